#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ldfm/error.hpp"
#include "ldfm/model_io.hpp"
#include "test_support.hpp"
#include <json.hpp>

using namespace ldfm;
using ldfm::testing::make_schema;

TEST_CASE("uniform model round-trips") {
  for (Variant variant : {Variant::kPlain, Variant::kStopAugmented}) {
    const LdfmModel m = make_uniform_model(make_schema({2, 3, 4}), variant);
    const LoadedModel back = model_from_text(model_to_text(m));
    CHECK(back.model == m);
    CHECK(back.warnings.empty());
  }
}

TEST_CASE("random weights round-trip bit for bit, metadata included") {
  Rng rng(61);
  const LdfmModel m = ldfm::testing::random_model(make_schema({3, 2, 5, 2}), Variant::kStopAugmented, rng);
  const auto path = std::filesystem::temp_directory_path() / "ldfm_test_model.json";
  save_model(path, m, ModelMetadata{12.375});
  const LoadedModel back = load_model(path);
  CHECK(back.model == m);
  CHECK(back.metadata.seconds_train == 12.375);
  CHECK(model_to_text(back.model, back.metadata) == model_to_text(m, ModelMetadata{12.375}));
}

TEST_CASE("truncated or garbled files are rejected") {
  const std::string text = model_to_text(make_uniform_model(make_schema({2, 2}), Variant::kPlain));
  CHECK_THROWS_AS(model_from_text(text.substr(0, text.size() / 2)), DataError);
  CHECK_THROWS_AS(model_from_text(""), DataError);
  CHECK_THROWS_AS(load_model(std::filesystem::temp_directory_path() / "ldfm_no_such_model.json"), DataError);
}

TEST_CASE("version and checksum mismatches are rejected") {
  const std::string text = model_to_text(make_uniform_model(make_schema({2, 2}), Variant::kPlain));
  auto doc = nlohmann::json::parse(text);
  doc["format_version"] = 2;
  CHECK_THROWS_AS(model_from_text(doc.dump()), DataError);

  doc = nlohmann::json::parse(text);
  doc["root"]["targets"]["X1"]["v0"] = 0.26;
  CHECK_THROWS_AS(model_from_text(doc.dump()), DataError);
}

TEST_CASE("a hand edit that breaks normalization loads with a warning") {
  const LdfmModel m = make_uniform_model(make_schema({2, 2}), Variant::kPlain);
  auto doc = nlohmann::json::parse(model_to_text(m));
  doc.erase("checksum");
  doc["root"]["targets"]["X1"]["v0"] = 0.25 + 1e-3;
  const LoadedModel loaded = model_from_text(doc.dump());
  CHECK(loaded.warnings.size() == 1);
  CHECK(loaded.model.dep(0, 0) == 0.25 + 1e-3);

  // Below the load threshold nothing is reported.
  doc["root"]["targets"]["X1"]["v0"] = 0.25 + 1e-8;
  CHECK(model_from_text(doc.dump()).warnings.empty());
}

TEST_CASE("missing weights are rejected") {
  auto doc = nlohmann::json::parse(model_to_text(make_uniform_model(make_schema({2, 2}), Variant::kPlain)));
  doc.erase("checksum");
  doc["root"]["targets"]["X1"].erase("v1");
  CHECK_THROWS_AS(model_from_text(doc.dump()), DataError);
}
