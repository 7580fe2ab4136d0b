#include <doctest.h>

#include <cmath>
#include <limits>

#include "fairmix/dataset.hpp"
#include "fairmix/error.hpp"
#include "test_util.hpp"

using namespace fairmix;
using fairmix::testing::TempDir;
using fairmix::testing::write_text;

namespace {

std::string feature_csv(int rows, int cols, int offset = 0) {
  std::string s = "sample_id";
  for (int c = 0; c < cols; ++c) s += ",f" + std::to_string(c);
  s += "\n";
  for (int r = 0; r < rows; ++r) {
    s += "clip" + std::to_string(r);
    for (int c = 0; c < cols; ++c) s += "," + std::to_string(r * 0.5 + c + offset);
    s += "\n";
  }
  return s;
}

std::string metadata_csv(int rows) {
  std::string s = "sample_id,subject_id,pa_score,gender,race\n";
  for (int r = 0; r < rows; ++r) {
    s += "clip" + std::to_string(r) + ",p" + std::to_string(r % 11) + "," +
         std::to_string(20 + r) + "," + std::to_string(r % 2) + "," + std::to_string((r / 2) % 2) + "\n";
  }
  return s;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("binarize_panas uses a strict threshold") {
  CHECK(binarize_panas(40.0, 33.3) == 1);
  CHECK(binarize_panas(20.0, 33.3) == 0);
  CHECK(binarize_panas(33.3, 33.3) == 0);
  CHECK(binarize_panas(33.3000001) == 1);
  CHECK_THROWS_AS(binarize_panas(std::numeric_limits<double>::quiet_NaN()), InputError);
  CHECK_THROWS_AS(binarize_panas(std::numeric_limits<double>::infinity()), InputError);
}

TEST_CASE("three modalities of 41 clips") {
  TempDir dir("ds41");
  write_text(dir / "face.csv", feature_csv(41, 6));
  write_text(dir / "audio.csv", feature_csv(41, 4, 10));
  write_text(dir / "text.csv", feature_csv(41, 2, 20));
  write_text(dir / "meta.csv", metadata_csv(41));
  write_text(dir / "manifest.txt",
             "modality.face=face.csv\nmodality.audio=audio.csv\nmodality.text=text.csv\nmetadata=meta.csv\n");
  const auto ds = load_dataset(dir / "manifest.txt");
  CHECK(ds.modalities().size() == 3);
  CHECK(ds.n_samples() == 41);
  CHECK(ds.modality("audio").n_features() == 4);
  CHECK(ds.attribute_names() == std::vector<std::string>{"gender", "race"});
  // pa_score = 20 + r, so rows 14.. are above 33.3
  CHECK(ds.meta()[13].label == 0);
  CHECK(ds.meta()[14].label == 1);
  CHECK(ds.warnings().empty());
}

TEST_CASE("single row loads with degenerate-group warnings") {
  TempDir dir("ds1");
  write_text(dir / "f.csv", "sample_id,x\na,1.5\n");
  write_text(dir / "m.csv", "sample_id,subject_id,label,gender\na,p1,1,0\n");
  write_text(dir / "manifest.txt", "modality.f=f.csv\nmetadata=m.csv\n");
  const auto ds = load_dataset(dir / "manifest.txt");
  CHECK(ds.n_samples() == 1);
  REQUIRE(ds.warnings().size() == 2);
  CHECK(ds.warnings()[0].find("degenerate group") != std::string::npos);
}

TEST_CASE("rows are joined by sample_id in metadata order") {
  TempDir dir("join");
  write_text(dir / "f.csv", "sample_id,x,y\nb,2,20\na,1,10\nc,3,30\n");
  write_text(dir / "m.csv", "sample_id,subject_id,label,g\na,p1,0,0\nb,p1,1,1\nc,p2,0,1\n");
  write_text(dir / "manifest.txt", "modality.f=f.csv\nmetadata=m.csv\n");
  const auto ds = load_dataset(dir / "manifest.txt");
  const auto& f = ds.modality("f");
  CHECK(f.samples(0, 0) == 1.0);
  CHECK(f.samples(1, 1) == 20.0);
  CHECK(f.samples(2, 0) == 3.0);
}

TEST_CASE("load errors") {
  TempDir dir("err");
  write_text(dir / "m.csv", "sample_id,subject_id,label,g\na,p1,0,0\nb,p1,1,1\n");

  SUBCASE("missing sample id") {
    write_text(dir / "f.csv", "sample_id,x\na,1\n");
    write_text(dir / "manifest.txt", "modality.f=f.csv\nmetadata=m.csv\n");
    try {
      load_dataset(dir / "manifest.txt");
      FAIL("expected AlignmentError");
    } catch (const AlignmentError& e) {
      CHECK(std::string(e.what()).find("'b'") != std::string::npos);
    }
  }
  SUBCASE("extra sample id") {
    write_text(dir / "f.csv", "sample_id,x\na,1\nb,2\nz,3\n");
    write_text(dir / "manifest.txt", "modality.f=f.csv\nmetadata=m.csv\n");
    CHECK_THROWS_AS(load_dataset(dir / "manifest.txt"), AlignmentError);
  }
  SUBCASE("non-numeric cell names row and column") {
    write_text(dir / "f.csv", "sample_id,x,y\na,1,2\nb,3,oops\n");
    write_text(dir / "manifest.txt", "modality.f=f.csv\nmetadata=m.csv\n");
    try {
      load_dataset(dir / "manifest.txt");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      const std::string msg = e.what();
      CHECK(msg.find(":3:") != std::string::npos);
      CHECK(msg.find("'y'") != std::string::npos);
    }
  }
  SUBCASE("duplicate sample id") {
    write_text(dir / "m2.csv", "sample_id,subject_id,label,g\na,p1,0,0\na,p1,1,1\n");
    write_text(dir / "f.csv", "sample_id,x\na,1\n");
    write_text(dir / "manifest.txt", "modality.f=f.csv\nmetadata=m2.csv\n");
    CHECK_THROWS_AS(load_dataset(dir / "manifest.txt"), SchemaError);
  }
  SUBCASE("unknown manifest key") {
    write_text(dir / "f.csv", "sample_id,x\na,1\nb,2\n");
    write_text(dir / "manifest.txt", "modality.f=f.csv\nmetadata=m.csv\nbogus=1\n");
    CHECK_THROWS_AS(load_dataset(dir / "manifest.txt"), SchemaError);
  }
  SUBCASE("non-binary attribute") {
    write_text(dir / "m3.csv", "sample_id,subject_id,label,g\na,p1,0,2\n");
    write_text(dir / "f.csv", "sample_id,x\na,1\n");
    write_text(dir / "manifest.txt", "modality.f=f.csv\nmetadata=m3.csv\n");
    CHECK_THROWS_AS(load_dataset(dir / "manifest.txt"), SchemaError);
  }
}

TEST_CASE("missing tokens become NaN and levels are applied") {
  TempDir dir("lv");
  write_text(dir / "f.csv", "sample_id,au1,mfcc1,mfcc2\na,1,,3\nb,NA,2,4\n");
  write_text(dir / "f_levels.csv", "feature_name,level\nau1,high\nmfcc1,low\n");
  write_text(dir / "m.csv", "sample_id,subject_id,label,g\na,p1,0,0\nb,p2,1,1\n");
  write_text(dir / "manifest.txt", "modality.f=f.csv\nlevels.f=f_levels.csv\nmetadata=m.csv\n");
  const auto ds = load_dataset(dir / "manifest.txt");
  const auto& t = ds.modality("f");
  CHECK(std::isnan(t.samples(0, 1)));
  CHECK(std::isnan(t.samples(1, 0)));
  CHECK(t.columns[0].level == FeatureLevel::high);
  CHECK(t.columns[1].level == FeatureLevel::low);
  CHECK(t.columns[2].level == FeatureLevel::low);
}

TEST_CASE("write and reload is bitwise identical") {
  auto ds = fairmix::testing::random_dataset(11, 6, 3, 2);
  // Awkward values: shortest round-trip must survive them.
  auto tables = ds.modalities();
  tables[0].samples(0, 0) = 0.1 + 0.2;
  tables[0].samples(1, 1) = std::numeric_limits<double>::quiet_NaN();
  tables[1].samples(2, 0) = -1e-300;
  tables[1].samples(3, 1) = 123456789.123456789;
  ds = ds.with_modalities(tables);

  TempDir dir("rt");
  const auto manifest = write_dataset(ds, dir.path());
  const auto back = load_dataset(manifest);
  CHECK(back == ds);
  CHECK(back.modality("m0").columns == ds.modality("m0").columns);
}

TEST_CASE("alignment of every modality with metadata") {
  const auto ds = fairmix::testing::random_dataset(3, 4, 2, 1);
  for (const auto& t : ds.modalities()) CHECK(t.n_samples() == static_cast<Index>(ds.n_samples()));
  const std::vector<std::size_t> rows{5, 1, 3};
  const auto sub = ds.subset(rows);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(sub.meta()[i].sample_id == ds.meta()[rows[i]].sample_id);
    CHECK(sub.modality("m1").samples.row(static_cast<Index>(i)) ==
          ds.modality("m1").samples.row(static_cast<Index>(rows[i])));
  }
}

TEST_CASE("dataset validation") {
  ModalityTable t{"f", Matrix::Zero(2, 1), {{"x", FeatureLevel::low}}};
  std::vector<SampleMeta> meta{{"a", "p", 0, {0}, false}, {"a", "p", 1, {1}, false}};
  CHECK_THROWS_AS(Dataset({t}, meta, {"g"}), SchemaError);
  meta[1].sample_id = "b";
  meta[1].attributes = {};
  CHECK_THROWS_AS(Dataset({t}, meta, {"g"}), SchemaError);
  meta[1].attributes = {1};
  ModalityTable short_table{"f", Matrix::Zero(1, 1), {{"x", FeatureLevel::low}}};
  CHECK_THROWS_AS(Dataset({short_table}, meta, {"g"}), AlignmentError);
  t.samples(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Dataset({t}, meta, {"g"}), SchemaError);
}

}  // TEST_SUITE
