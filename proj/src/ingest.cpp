#include "riskprop/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "riskprop/error.hpp"

namespace riskprop {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

bool skippable(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

// Reads lines until the header row. Returns false on EOF.
bool read_header(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!skippable(line)) return true;
  }
  return false;
}

class DisjointSets {
public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

  std::size_t size_of(std::size_t x) { return size_[find(x)]; }

private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace

std::optional<Address> normalize_address(std::string_view raw) {
  raw = trim(raw);
  if (raw.size() < 3 || raw[0] != '0' || (raw[1] != 'x' && raw[1] != 'X')) return std::nullopt;
  Address out = "0x";
  out.reserve(raw.size());
  for (char c : raw.substr(2)) {
    if (!std::isxdigit(static_cast<unsigned char>(c))) return std::nullopt;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::optional<Amount> Amount::parse(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  for (char c : text)
    if (c < '0' || c > '9') return std::nullopt;
  const auto first = text.find_first_not_of('0');
  Amount a;
  a.digits_ = first == std::string_view::npos ? "0" : std::string(text.substr(first));
  return a;
}

TransactionParseResult parse_transactions(std::istream& in, const ColumnMapping& columns,
                                          char delimiter) {
  TransactionParseResult result;
  std::string line;
  std::size_t line_no = 0;
  if (!read_header(in, line, line_no)) throw ParseError("transactions file has no header row", 0);

  const auto header = split(line, delimiter);
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  auto required = [&](const std::string& name) {
    const auto idx = column(name);
    if (!idx) throw ParseError("missing required column '" + name + "'", line_no);
    return *idx;
  };
  const std::size_t tx_col = required(columns.tx);
  const std::size_t payer_col = required(columns.payer);
  const std::size_t payee_col = required(columns.payee);
  const std::size_t value_col = required(columns.value);
  const auto ts_col = column(columns.timestamp);
  const std::size_t width = header.size();

  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto fields = split(line, delimiter);
    auto reject = [&](std::string message) {
      result.errors.push_back({line_no, std::move(message)});
    };
    if (fields.size() != width) {
      reject("expected " + std::to_string(width) + " fields, found " +
             std::to_string(fields.size()));
      continue;
    }
    auto payer = normalize_address(fields[payer_col]);
    auto payee = normalize_address(fields[payee_col]);
    if (!payer || !payee) {
      reject("malformed address");
      continue;
    }
    auto value = Amount::parse(fields[value_col]);
    if (!value) {
      reject("unparseable value '" + std::string(fields[value_col]) + "'");
      continue;
    }
    TransactionRecord rec{std::string(fields[tx_col]), std::move(*payer), std::move(*payee),
                          std::move(*value), std::nullopt};
    if (ts_col && !fields[*ts_col].empty()) {
      const auto ts = fields[*ts_col];
      std::uint64_t t = 0;
      const auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), t);
      if (ec != std::errc{} || ptr != ts.data() + ts.size()) {
        reject("unparseable timestamp '" + std::string(ts) + "'");
        continue;
      }
      rec.timestamp = t;
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

std::vector<TransactionRecord> filter_zero_value(std::vector<TransactionRecord> records) {
  std::erase_if(records, [](const TransactionRecord& r) { return r.value.is_zero(); });
  return records;
}

std::vector<TransactionRecord> extract_largest_wcc(const std::vector<TransactionRecord>& records) {
  if (records.empty()) return {};

  std::vector<std::string_view> accounts;
  accounts.reserve(records.size() * 2);
  for (const auto& r : records) {
    accounts.push_back(r.payer);
    accounts.push_back(r.payee);
  }
  std::sort(accounts.begin(), accounts.end());
  accounts.erase(std::unique(accounts.begin(), accounts.end()), accounts.end());
  // Index order equals address order, so the smallest index in a component
  // is its smallest member address.
  auto index_of = [&](std::string_view a) {
    return static_cast<std::size_t>(std::lower_bound(accounts.begin(), accounts.end(), a) -
                                    accounts.begin());
  };

  DisjointSets sets(accounts.size());
  std::vector<std::pair<std::size_t, std::size_t>> ends;
  ends.reserve(records.size());
  for (const auto& r : records) {
    ends.emplace_back(index_of(r.payer), index_of(r.payee));
    sets.unite(ends.back().first, ends.back().second);
  }

  // Scanning accounts in address order, the first root reaching the maximum
  // size owns the smallest member address among the largest components.
  std::size_t best_root = sets.find(0);
  std::size_t best_size = 0;
  for (std::size_t i = 0; i < accounts.size(); ++i) {
    const std::size_t s = sets.size_of(i);
    if (s > best_size) {
      best_size = s;
      best_root = sets.find(i);
    }
  }

  std::vector<TransactionRecord> kept;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (sets.find(ends[i].first) == best_root) kept.push_back(records[i]);
  return kept;
}

void write_transactions(std::ostream& out, const std::vector<TransactionRecord>& records) {
  bool with_ts = std::any_of(records.begin(), records.end(),
                             [](const TransactionRecord& r) { return r.timestamp.has_value(); });
  out << (with_ts ? "tx,from,to,value,timestamp\n" : "tx,from,to,value\n");
  for (const auto& r : records) {
    out << r.tx_id << ',' << r.payer << ',' << r.payee << ',' << r.value.str();
    if (with_ts) {
      out << ',';
      if (r.timestamp) out << *r.timestamp;
    }
    out << '\n';
  }
}

namespace {

constexpr std::pair<Category, std::string_view> kCategoryNames[] = {
    {Category::kIcoWallet, "ico-wallet"}, {Category::kConverter, "converter"},
    {Category::kMining, "mining"},        {Category::kExchange, "exchange"},
    {Category::kGambling, "gambling"},    {Category::kPhishHack, "phish-hack"},
    {Category::kLicitOther, "licit-other"},
};

}  // namespace

std::string_view to_string(Category c) {
  for (const auto& [cat, name] : kCategoryNames)
    if (cat == c) return name;
  return "unknown";
}

std::optional<Category> parse_category(std::string_view text) {
  text = trim(text);
  for (const auto& [cat, name] : kCategoryNames)
    if (name == text) return cat;
  return std::nullopt;
}

bool LabelTable::set(const Address& address, Category category) {
  auto [it, inserted] = entries_.insert_or_assign(address, category);
  return !inserted;
}

std::optional<Category> LabelTable::find(const Address& address) const {
  const auto it = entries_.find(address);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

LabelParseResult parse_labels(std::istream& in) {
  LabelParseResult result;
  std::string line;
  std::size_t line_no = 0;
  if (!read_header(in, line, line_no)) throw ParseError("labels file has no header row", 0);
  const auto header = split(line, ',');
  if (header.size() != 2 || header[0] != "address" || header[1] != "category")
    throw ParseError("expected header 'address,category'", line_no);

  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 2) throw ParseError("expected 2 fields", line_no);
    const auto address = normalize_address(fields[0]);
    if (!address) throw ParseError("malformed address '" + std::string(fields[0]) + "'", line_no);
    const auto category = parse_category(fields[1]);
    if (!category)
      throw ParseError("unknown category '" + std::string(fields[1]) + "'", line_no);
    if (result.labels.set(*address, *category))
      result.warnings.push_back({line_no, "duplicate address " + *address + ", last entry wins"});
  }
  return result;
}

void write_labels(std::ostream& out, const LabelTable& labels) {
  out << "address,category\n";
  for (const auto& [address, category] : labels.entries())
    out << address << ',' << to_string(category) << '\n';
}

}  // namespace riskprop
