#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ideagen::corpus {

using Date = std::chrono::year_month_day;

// Parses YYYY-MM-DD; throws DataError on anything else or an invalid day.
Date parse_date(std::string_view s);
std::string format_date(const Date& d);

struct PatentRecord {
  std::string patent_id;
  std::string title;
  std::string domain_id;
  Date grant_date;
  std::vector<std::string> class_codes;

  bool operator==(const PatentRecord&) const = default;
};

struct Domain {
  std::string domain_id;
  std::string display_name;
  std::vector<std::string> class_codes;
};

/// Reads a corpus file (one tab-separated record per line:
/// id, grant date, domain, `;`-joined class codes, title). Blank lines are
/// skipped. When `domain_id` is non-empty every record must belong to it.
/// Errors carry the 1-based line number, e.g. "line 3: missing title".
std::vector<PatentRecord> ingest_corpus(const std::filesystem::path& path,
                                        std::string_view domain_id = {});

// Same as ingest_corpus over in-memory text.
std::vector<PatentRecord> parse_corpus(std::string_view content,
                                       std::string_view domain_id = {});

std::string format_record(const PatentRecord& r);
void write_corpus(const std::filesystem::path& path,
                  std::span<const PatentRecord> records);

// Keeps records whose title has at least `min_words` whitespace-delimited
// words. Order is preserved.
std::vector<PatentRecord> filter_titles(std::span<const PatentRecord> records,
                                        int min_words = 4);

struct Selection {
  std::vector<PatentRecord> records;
  // Set when fewer than n records were available.
  bool undersized = false;
};

// The n most recent records by grant date, ties resolved toward the larger
// patent id. Output is ordered newest first.
Selection select_latest(std::span<const PatentRecord> records, int n = 20000);

enum class Provenance { kLoaded, kComputed };

// Symmetric domain-to-domain proximity scores (higher = closer). Immutable
// once built.
class ProximityTable {
 public:
  ProximityTable() = default;

  // Entries may list each unordered pair once in either orientation. Missing
  // self entries are filled with the row maximum. Throws DataError on
  // asymmetric duplicates, non-finite scores, or a self score below another
  // score in its row.
  static ProximityTable from_entries(
      const std::vector<std::tuple<std::string, std::string, double>>& entries,
      Provenance provenance);

  bool has_domain(std::string_view id) const;
  // Throws DataError for unknown ids. Absent cross pairs read as 0.
  double lookup(std::string_view a, std::string_view b) const;

  const std::vector<std::string>& domains() const { return domains_; }
  Provenance provenance() const { return provenance_; }

  std::vector<std::string> warnings;

 private:
  static std::pair<std::string, std::string> key(std::string_view a,
                                                 std::string_view b);

  std::vector<std::string> domains_;
  std::map<std::pair<std::string, std::string>, double> scores_;
  Provenance provenance_ = Provenance::kComputed;
};

/// Cosine similarity between per-domain class-code count vectors, where
/// component c of domain D counts D's patents carrying code c. A domain
/// with no classified patents gets proximity 0 to every other domain and a
/// warning on the table. Self proximity is 1.
ProximityTable compute_proximity(std::span<const PatentRecord> records,
                                 std::span<const Domain> domains);

ProximityTable load_proximity(const std::filesystem::path& path);
void save_proximity(const ProximityTable& table,
                    const std::filesystem::path& path);

struct RankedDomain {
  Domain domain;
  int rank = 0;
  double proximity = 0.0;
};

// Non-target domains by descending proximity to `target`, ties by domain id.
// `catalog` supplies display names; ids missing from it display as the id.
std::vector<RankedDomain> rank_domains(const ProximityTable& table,
                                       std::string_view target,
                                       std::span<const Domain> catalog = {});

// Domain catalog file: `domain_id<TAB>display_name<TAB>code;code` per line.
std::vector<Domain> load_domains(const std::filesystem::path& path);
void save_domains(const std::filesystem::path& path,
                  std::span<const Domain> domains);

}  // namespace ideagen::corpus
