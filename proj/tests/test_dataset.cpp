#include <doctest.h>

#include <json.hpp>

#include "msift/dataset.hpp"
#include "test_support.hpp"

using namespace msift;
using msift::test::make_test_catalog;
using msift::test::TempDir;
using nlohmann::json;

namespace {

json valid_record_json() {
  return json::parse(R"({
    "id": "rec-1",
    "instruction": "Explain tides.",
    "responses": [
      {"model": "gemma2-2b", "text": "short answer", "rewards": {"rm": 4.5}},
      {"model": "gemma2-9b", "text": "long answer", "rewards": {"rm": 7.25}}
    ],
    "embedding": [0.1, -0.2, 0.3]
  })");
}

}  // namespace

TEST_CASE("record_from_json parses a well-formed record") {
  const ModelCatalog catalog = make_test_catalog();
  const InstructionRecord rec = record_from_json(valid_record_json(), &catalog);
  CHECK(rec.id == "rec-1");
  CHECK(rec.instruction == "Explain tides.");
  REQUIRE(rec.responses.size() == 2);
  CHECK(rec.responses[0].model_id == "gemma2-2b");
  CHECK(rec.responses[0].rewards.at("rm") == 4.5);
  CHECK(rec.responses[1].text == "long answer");
  REQUIRE(rec.embedding.has_value());
  CHECK(rec.embedding->size() == 3);
  CHECK((*rec.embedding)[1] == -0.2);
}

TEST_CASE("records survive a serialization round trip") {
  const ModelCatalog catalog = make_test_catalog();
  const InstructionRecord rec = record_from_json(valid_record_json(), &catalog);
  const InstructionRecord back = record_from_json(record_to_json(rec), &catalog);
  CHECK(back.id == rec.id);
  CHECK(back.instruction == rec.instruction);
  REQUIRE(back.responses.size() == rec.responses.size());
  for (std::size_t i = 0; i < rec.responses.size(); ++i) {
    CHECK(back.responses[i].model_id == rec.responses[i].model_id);
    CHECK(back.responses[i].text == rec.responses[i].text);
    CHECK(back.responses[i].rewards == rec.responses[i].rewards);
  }
  CHECK(back.embedding == rec.embedding);
}

TEST_CASE("record validation pinpoints each defect") {
  const ModelCatalog catalog = make_test_catalog();
  const auto reject = [&](const char* mutate_key, json value, const char* needle) {
    json j = valid_record_json();
    if (value.is_null() && std::string(mutate_key) != "embedding") {
      j.erase(mutate_key);
    } else {
      j[mutate_key] = value;
    }
    CHECK_THROWS_WITH_AS(record_from_json(j, &catalog), doctest::Contains(needle),
                         ValidationError);
  };
  reject("id", nullptr, "missing field 'id'");
  reject("id", "", "empty id");
  reject("instruction", nullptr, "missing field 'instruction'");
  reject("instruction", "", "empty instruction");
  reject("responses", json::array(), "non-empty array");
  reject("embedding", json::array(), "non-empty array");
  reject("embedding", json::parse(R"([1, "x"])"), "expected a number");

  json dup = valid_record_json();
  dup["responses"][1]["model"] = "gemma2-2b";
  CHECK_THROWS_WITH_AS(record_from_json(dup, &catalog),
                       doctest::Contains("multiple responses from model 'gemma2-2b'"),
                       ValidationError);

  json unknown = valid_record_json();
  unknown["responses"][0]["model"] = "not-a-model";
  CHECK_THROWS_WITH_AS(record_from_json(unknown, &catalog), doctest::Contains("not in catalog"),
                       ValidationError);
  // Without a catalog the same record is accepted.
  CHECK(record_from_json(unknown, nullptr).responses[0].model_id == "not-a-model");

  json mismatched = valid_record_json();
  mismatched["responses"][1]["rewards"] = {{"other", 1.0}};
  CHECK_THROWS_WITH_AS(record_from_json(mismatched, &catalog),
                       doctest::Contains("reward-model keys differ"), ValidationError);

  json empty_rewards = valid_record_json();
  empty_rewards["responses"][0]["rewards"] = json::object();
  CHECK_THROWS_WITH_AS(record_from_json(empty_rewards, &catalog),
                       doctest::Contains("non-empty object"), ValidationError);

  json bad_reward = valid_record_json();
  bad_reward["responses"][0]["rewards"]["rm"] = "high";
  CHECK_THROWS_WITH_AS(record_from_json(bad_reward, &catalog),
                       doctest::Contains("expected a number"), ValidationError);
}

TEST_CASE("catalog_from_json validates structure and content") {
  const json good = json::parse(
      R"({"models": [{"id": "m1", "family": "f", "params_b": 2},
                     {"id": "m2", "family": "f", "params_b": 7}]})");
  const ModelCatalog catalog = catalog_from_json(good);
  CHECK(catalog.models().size() == 2);
  CHECK(catalog.rankable_family_count() == 1);
  CHECK(catalog.contains("m1"));
  CHECK(catalog.find("m2")->params_b == 7);
  CHECK(catalog.find("nope") == nullptr);

  CHECK_THROWS_AS(catalog_from_json(json::parse(R"({"models": []})")), ValidationError);
  CHECK_THROWS_WITH_AS(
      catalog_from_json(json::parse(
          R"({"models": [{"id": "m", "family": "f", "params_b": 1},
                         {"id": "m", "family": "g", "params_b": 2}]})")),
      doctest::Contains("duplicate"), ValidationError);
  CHECK_THROWS_WITH_AS(
      catalog_from_json(json::parse(R"({"models": [{"id": "m", "family": "f", "params_b": 0}]})")),
      doctest::Contains("positive"), ValidationError);
  CHECK_THROWS_WITH_AS(
      catalog_from_json(json::parse(R"({"models": [{"id": "m", "params_b": 1}]})")),
      doctest::Contains("family"), ValidationError);
}

TEST_CASE("strict reading aborts on the first bad line, naming it") {
  const TempDir tmp;
  const std::string good_line = record_to_json(record_from_json(valid_record_json(), nullptr)).dump();
  const std::string path = tmp.write("data.jsonl", good_line + "\n{not json\n");
  DatasetReader reader(path, nullptr, true);
  CHECK(reader.next().has_value());
  CHECK_THROWS_WITH_AS(reader.next(), doctest::Contains(":2: malformed JSON"), ValidationError);
}

TEST_CASE("lenient reading accounts for every line") {
  const TempDir tmp;
  json second = valid_record_json();
  second["id"] = "rec-2";
  json third = valid_record_json();  // duplicate id, rejected
  json fourth = valid_record_json();
  fourth["id"] = "rec-4";
  fourth["embedding"] = {0.1, 0.2};  // dimension clash with rec-1's 3
  const std::string path = tmp.write("data.jsonl", valid_record_json().dump() + "\n" +
                                                       "\n" +  // blank
                                                       second.dump() + "\n" + third.dump() + "\n" +
                                                       "garbage\n" + fourth.dump() + "\n");
  ReaderStats stats;
  const auto records = load_dataset(path, nullptr, false, &stats);
  REQUIRE(records.size() == 2);
  CHECK(records[0].id == "rec-1");
  CHECK(records[1].id == "rec-2");
  CHECK(stats.lines == 6);
  CHECK(stats.accepted == 2);
  CHECK(stats.rejected == 4);
  CHECK(stats.accepted + stats.rejected == stats.lines);
  REQUIRE(stats.diagnostics.size() == 4);
  CHECK(stats.diagnostics[0].find("blank line") != std::string::npos);
  CHECK(stats.diagnostics[1].find("duplicate record id 'rec-1'") != std::string::npos);
  CHECK(stats.diagnostics[2].find("malformed JSON") != std::string::npos);
  CHECK(stats.diagnostics[3].find("embedding dimension 2 != dataset-wide 3") != std::string::npos);
}

TEST_CASE("a dataset file round-trips through dataset_to_jsonl") {
  const TempDir tmp;
  std::vector<InstructionRecord> records;
  records.push_back(record_from_json(valid_record_json(), nullptr));
  json second = valid_record_json();
  second["id"] = "rec-2";
  second.erase("embedding");
  records.push_back(record_from_json(second, nullptr));
  const std::string path = tmp.write("rt.jsonl", dataset_to_jsonl(records));
  const auto back = load_dataset(path, nullptr);
  REQUIRE(back.size() == 2);
  CHECK(back[0].id == "rec-1");
  CHECK(back[0].embedding.has_value());
  CHECK(!back[1].embedding.has_value());
  CHECK(dataset_to_jsonl(back) == dataset_to_jsonl(records));
}

TEST_CASE("missing dataset files raise IoError") {
  CHECK_THROWS_AS(DatasetReader("/no/such/file.jsonl", nullptr, true), IoError);
}

TEST_CASE("score tables round-trip, including null and imputed stability") {
  const TempDir tmp;
  ScoreTable table;
  ScoreRow a;
  a.instruction_id = "a";
  a.difficulty = -3.5;
  a.separability = 1.25;
  a.stability = -0.5;
  a.multi = 2.75;
  ScoreRow b;
  b.instruction_id = "b";
  b.difficulty = 0;
  b.separability = 0;
  b.multi = 1.0;
  b.stability_imputed = true;
  table.rows = {a, b};
  const std::string path = tmp.write("scores.jsonl", score_table_to_jsonl(table));
  const ScoreTable back = load_score_table(path);
  REQUIRE(back.size() == 2);
  CHECK(back.rows[0].instruction_id == "a");
  CHECK(back.rows[0].stability == -0.5);
  CHECK(back.rows[0].multi == 2.75);
  CHECK(!back.rows[0].stability_imputed);
  CHECK(!back.rows[1].stability.has_value());
  CHECK(back.rows[1].stability_imputed);
  CHECK(score_table_to_jsonl(back) == score_table_to_jsonl(table));
}

TEST_CASE("score table validation rejects out-of-range values") {
  const TempDir tmp;
  const std::string neg = tmp.write(
      "neg.jsonl", R"({"id":"x","difficulty":0,"separability":-1,"stability":null,"multi":null})"
                   "\n");
  CHECK_THROWS_WITH_AS(load_score_table(neg), doctest::Contains("non-negative"), ValidationError);
  const std::string oob = tmp.write(
      "oob.jsonl", R"({"id":"x","difficulty":0,"separability":0,"stability":1.5,"multi":null})"
                   "\n");
  CHECK_THROWS_WITH_AS(load_score_table(oob), doctest::Contains("[-1, 1]"), ValidationError);
}

TEST_CASE("cluster assignments round-trip and validate") {
  const TempDir tmp;
  const std::vector<ClusterAssignment> assignments = {{"a", 0}, {"b", 2}, {"c", 1}};
  const std::string path = tmp.write("assign.jsonl", assignments_to_jsonl(assignments));
  const auto back = load_assignments(path);
  REQUIRE(back.size() == 3);
  CHECK(back[1].instruction_id == "b");
  CHECK(back[1].cluster_id == 2);
  CHECK(assignments_to_jsonl(back) == assignments_to_jsonl(assignments));

  const std::string bad = tmp.write("bad.jsonl", R"({"id":"a","cluster":-1})" "\n");
  CHECK_THROWS_WITH_AS(load_assignments(bad), doctest::Contains("non-negative"), ValidationError);
}
