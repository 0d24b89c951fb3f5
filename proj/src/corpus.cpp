#include "ideagen/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "ideagen/errors.hpp"
#include "ideagen/io.hpp"
#include "ideagen/text.hpp"

namespace ideagen::corpus {

namespace {

std::string line_error(std::size_t line_no, std::string_view reason) {
  return "line " + std::to_string(line_no) + ": " + std::string(reason);
}

}  // namespace

Date parse_date(std::string_view s) {
  s = text::trim(s);
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
    throw DataError("invalid date '" + std::string(s) + "'");
  }
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (s[i] < '0' || s[i] > '9') {
      throw DataError("invalid date '" + std::string(s) + "'");
    }
  }
  const int y = static_cast<int>(text::parse_int(s.substr(0, 4)));
  const unsigned m = static_cast<unsigned>(text::parse_int(s.substr(5, 2)));
  const unsigned d = static_cast<unsigned>(text::parse_int(s.substr(8, 2)));
  const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) throw DataError("invalid date '" + std::string(s) + "'");
  return date;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

std::vector<PatentRecord> parse_corpus(std::string_view content,
                                       std::string_view domain_id) {
  std::vector<PatentRecord> records;
  std::unordered_set<std::string> seen;
  const auto all_lines = io::lines(content);
  for (std::size_t i = 0; i < all_lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string& line = all_lines[i];
    if (text::trim(line).empty()) continue;

    auto fields = text::split(line, '\t');
    if (fields.size() < 4) {
      throw DataError(line_error(line_no, "expected 5 tab-separated fields, got " +
                                              std::to_string(fields.size())));
    }
    if (fields.size() == 4 || text::trim(fields[4]).empty()) {
      throw DataError(line_error(line_no, "missing title"));
    }
    if (fields.size() > 5) {
      throw DataError(line_error(line_no, "expected 5 tab-separated fields, got " +
                                              std::to_string(fields.size())));
    }

    PatentRecord r;
    r.patent_id = std::string(text::trim(fields[0]));
    if (r.patent_id.empty()) throw DataError(line_error(line_no, "missing patent_id"));
    try {
      r.grant_date = parse_date(fields[1]);
    } catch (const DataError& e) {
      throw DataError(line_error(line_no, e.what()));
    }
    r.domain_id = std::string(text::trim(fields[2]));
    if (r.domain_id.empty()) throw DataError(line_error(line_no, "missing domain_id"));
    if (!domain_id.empty() && r.domain_id != domain_id) {
      throw DataError(line_error(line_no, "domain '" + r.domain_id +
                                              "' does not match '" +
                                              std::string(domain_id) + "'"));
    }
    for (const auto& code : text::split(fields[3], ';')) {
      const auto c = text::trim(code);
      if (!c.empty()) r.class_codes.emplace_back(c);
    }
    r.title = std::string(text::trim(fields[4]));

    if (!seen.insert(r.patent_id).second) {
      throw DataError(line_error(line_no, "duplicate patent_id '" + r.patent_id + "'"));
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<PatentRecord> ingest_corpus(const std::filesystem::path& path,
                                        std::string_view domain_id) {
  try {
    return parse_corpus(io::read_file(path), domain_id);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string format_record(const PatentRecord& r) {
  return r.patent_id + '\t' + format_date(r.grant_date) + '\t' + r.domain_id +
         '\t' + text::join(r.class_codes, ";") + '\t' + r.title;
}

void write_corpus(const std::filesystem::path& path,
                  std::span<const PatentRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += format_record(r);
    out += '\n';
  }
  io::write_file(path, out);
}

std::vector<PatentRecord> filter_titles(std::span<const PatentRecord> records,
                                        int min_words) {
  std::vector<PatentRecord> out;
  for (const auto& r : records) {
    if (static_cast<int>(text::split_words(r.title).size()) >= min_words) {
      out.push_back(r);
    }
  }
  return out;
}

Selection select_latest(std::span<const PatentRecord> records, int n) {
  std::vector<const PatentRecord*> order;
  order.reserve(records.size());
  for (const auto& r : records) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const PatentRecord* a, const PatentRecord* b) {
    if (a->grant_date != b->grant_date) return a->grant_date > b->grant_date;
    return a->patent_id > b->patent_id;
  });

  Selection sel;
  const auto want = static_cast<std::size_t>(std::max(n, 0));
  sel.undersized = records.size() < want;
  const std::size_t take = std::min(want, order.size());
  sel.records.reserve(take);
  for (std::size_t i = 0; i < take; ++i) sel.records.push_back(*order[i]);
  return sel;
}

std::pair<std::string, std::string> ProximityTable::key(std::string_view a,
                                                        std::string_view b) {
  if (b < a) std::swap(a, b);
  return {std::string(a), std::string(b)};
}

ProximityTable ProximityTable::from_entries(
    const std::vector<std::tuple<std::string, std::string, double>>& entries,
    Provenance provenance) {
  ProximityTable t;
  t.provenance_ = provenance;
  std::set<std::string> ids;
  for (const auto& [a, b, score] : entries) {
    if (!std::isfinite(score)) {
      throw DataError("non-finite proximity for " + a + "/" + b);
    }
    ids.insert(a);
    ids.insert(b);
    auto k = key(a, b);
    auto [it, inserted] = t.scores_.emplace(k, score);
    if (!inserted && it->second != score) {
      throw DataError("asymmetric proximity for " + a + "/" + b);
    }
  }
  t.domains_.assign(ids.begin(), ids.end());

  for (const auto& d : t.domains_) {
    double row_max = -std::numeric_limits<double>::infinity();
    for (const auto& other : t.domains_) {
      if (other == d) continue;
      auto it = t.scores_.find(key(d, other));
      if (it != t.scores_.end()) row_max = std::max(row_max, it->second);
    }
    auto self = t.scores_.find(key(d, d));
    if (self == t.scores_.end()) {
      t.scores_.emplace(key(d, d), std::isfinite(row_max) ? row_max : 0.0);
    } else if (std::isfinite(row_max) && self->second < row_max) {
      throw DataError("self proximity of " + d + " is below another score in its row");
    }
  }
  return t;
}

bool ProximityTable::has_domain(std::string_view id) const {
  return std::binary_search(domains_.begin(), domains_.end(), id);
}

double ProximityTable::lookup(std::string_view a, std::string_view b) const {
  for (auto id : {a, b}) {
    if (!has_domain(id)) throw DataError("unknown domain '" + std::string(id) + "'");
  }
  auto it = scores_.find(key(a, b));
  return it == scores_.end() ? 0.0 : it->second;
}

ProximityTable compute_proximity(std::span<const PatentRecord> records,
                                 std::span<const Domain> domains) {
  if (domains.size() < 2) throw DataError("proximity needs at least 2 domains");

  std::map<std::string, std::map<std::string, double>> vectors;
  for (const auto& d : domains) vectors[d.domain_id];
  for (const auto& r : records) {
    auto it = vectors.find(r.domain_id);
    if (it == vectors.end()) continue;
    for (const auto& c : r.class_codes) it->second[c] += 1.0;
  }

  std::map<std::string, double> norms;
  std::vector<std::string> warnings;
  for (const auto& [id, vec] : vectors) {
    double ss = 0.0;
    for (const auto& [code, count] : vec) ss += count * count;
    norms[id] = std::sqrt(ss);
    if (ss == 0.0) {
      warnings.push_back("domain '" + id +
                         "' has no classified patents; proximity set to 0");
    }
  }

  std::vector<std::tuple<std::string, std::string, double>> entries;
  for (auto a = vectors.begin(); a != vectors.end(); ++a) {
    entries.emplace_back(a->first, a->first, 1.0);
    for (auto b = std::next(a); b != vectors.end(); ++b) {
      double score = 0.0;
      const double denom = norms[a->first] * norms[b->first];
      if (denom > 0.0) {
        double dot = 0.0;
        for (const auto& [code, count] : a->second) {
          auto it = b->second.find(code);
          if (it != b->second.end()) dot += count * it->second;
        }
        score = std::clamp(dot / denom, 0.0, 1.0);
      }
      entries.emplace_back(a->first, b->first, score);
    }
  }
  auto table = ProximityTable::from_entries(entries, Provenance::kComputed);
  table.warnings = std::move(warnings);
  return table;
}

ProximityTable load_proximity(const std::filesystem::path& path) {
  const auto content = io::read_file(path);
  const auto all_lines = io::lines(content);
  if (all_lines.empty() || text::trim(all_lines[0]) != "#proximity v1") {
    throw DataError(path.string() + ": missing '#proximity v1' header");
  }
  std::vector<std::tuple<std::string, std::string, double>> entries;
  for (std::size_t i = 1; i < all_lines.size(); ++i) {
    if (text::trim(all_lines[i]).empty()) continue;
    const auto f = text::split(all_lines[i], '\t');
    if (f.size() != 3) {
      throw DataError(path.string() + ": " + line_error(i + 1, "expected 3 fields"));
    }
    try {
      entries.emplace_back(std::string(text::trim(f[0])), std::string(text::trim(f[1])),
                           text::parse_double(f[2]));
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + line_error(i + 1, e.what()));
    }
  }
  return ProximityTable::from_entries(entries, Provenance::kLoaded);
}

void save_proximity(const ProximityTable& table,
                    const std::filesystem::path& path) {
  std::string out = "#proximity v1\n";
  const auto& ids = table.domains();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i; j < ids.size(); ++j) {
      out += ids[i] + '\t' + ids[j] + '\t' +
             text::format_double(table.lookup(ids[i], ids[j])) + '\n';
    }
  }
  io::write_file(path, out);
}

std::vector<RankedDomain> rank_domains(const ProximityTable& table,
                                       std::string_view target,
                                       std::span<const Domain> catalog) {
  if (!table.has_domain(target)) {
    throw DataError("unknown target domain '" + std::string(target) + "'");
  }
  std::vector<RankedDomain> out;
  for (const auto& id : table.domains()) {
    if (id == target) continue;
    RankedDomain rd;
    auto it = std::find_if(catalog.begin(), catalog.end(),
                           [&](const Domain& d) { return d.domain_id == id; });
    if (it != catalog.end()) {
      rd.domain = *it;
    } else {
      rd.domain.domain_id = id;
      rd.domain.display_name = id;
    }
    rd.proximity = table.lookup(target, id);
    out.push_back(std::move(rd));
  }
  std::sort(out.begin(), out.end(), [](const RankedDomain& a, const RankedDomain& b) {
    if (a.proximity != b.proximity) return a.proximity > b.proximity;
    return a.domain.domain_id < b.domain.domain_id;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i + 1);
  return out;
}

std::vector<Domain> load_domains(const std::filesystem::path& path) {
  std::vector<Domain> out;
  std::set<std::string> seen;
  const auto all_lines = io::lines(io::read_file(path));
  for (std::size_t i = 0; i < all_lines.size(); ++i) {
    if (text::trim(all_lines[i]).empty() || all_lines[i][0] == '#') continue;
    const auto f = text::split(all_lines[i], '\t');
    if (f.size() != 3) {
      throw DataError(path.string() + ": " + line_error(i + 1, "expected 3 fields"));
    }
    Domain d;
    d.domain_id = std::string(text::trim(f[0]));
    d.display_name = std::string(text::trim(f[1]));
    for (const auto& c : text::split(f[2], ';')) {
      if (!text::trim(c).empty()) d.class_codes.emplace_back(text::trim(c));
    }
    if (d.class_codes.empty()) {
      throw DataError(path.string() + ": " + line_error(i + 1, "domain needs a class code"));
    }
    if (!seen.insert(d.domain_id).second) {
      throw DataError(path.string() + ": duplicate domain '" + d.domain_id + "'");
    }
    out.push_back(std::move(d));
  }
  return out;
}

void save_domains(const std::filesystem::path& path,
                  std::span<const Domain> domains) {
  std::string out;
  for (const auto& d : domains) {
    out += d.domain_id + '\t' + d.display_name + '\t' + text::join(d.class_codes, ";") + '\n';
  }
  io::write_file(path, out);
}

}  // namespace ideagen::corpus
