#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "convrec/corpus.hpp"
#include "convrec/engine.hpp"
#include "convrec/filters.hpp"
#include "convrec/metrics.hpp"

namespace convrec::io {

// Stage outputs are line-delimited JSON. The first line of every file is a
// header record {"kind":"header",...} echoing the resolved config.
nlohmann::json make_header(const std::string& stage,
                           const nlohmann::json& resolved_config);

class JsonlWriter {
 public:
  // Creates (or appends to) path; the header is written only when the file
  // is new or empty. Writes go to the stream immediately; rename-free
  // append keeps resumption cheap.
  JsonlWriter(const std::string& path, const nlohmann::json& header);
  ~JsonlWriter();

  void write(const nlohmann::json& record);
  void flush();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Reads every non-header record of a JSONL file.
std::vector<nlohmann::json> read_jsonl(const std::string& path);

bool file_exists(const std::string& path);
void ensure_parent_dir(const std::string& path);

// Atomic file write (temp + rename), safe under concurrent writers.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

nlohmann::json dialogue_to_json(const Dialogue& dialogue);
Dialogue dialogue_from_json(const nlohmann::json& j);

nlohmann::json persona_to_json(const Persona& persona);
Persona persona_from_json(const nlohmann::json& j);

nlohmann::json abstract_to_json(const Abstract& abstract);
Abstract abstract_from_json(const nlohmann::json& j);

nlohmann::json verdict_to_json(const FilterVerdict& verdict);
FilterVerdict verdict_from_json(const nlohmann::json& j);

nlohmann::json ingest_report_to_json(const IngestReport& report);
nlohmann::json run_report_to_json(const RunReport& report);
nlohmann::json filter_report_to_json(const FilterReport& report);
nlohmann::json metrics_report_to_json(const MetricsReport& report);

// Serialized database round-trip.
void save_user_db(const UserReviewDB& db, const std::string& path,
                  const nlohmann::json& header);
UserReviewDB load_user_db(const std::string& path);
void save_item_db(const ItemReviewDB& db, const std::string& path,
                  const nlohmann::json& header);
ItemReviewDB load_item_db(const std::string& path);

}  // namespace convrec::io
