#pragma once

// Transaction and label file ingestion plus the two preprocessing filters
// applied before graph construction (zero-value removal, largest weakly
// connected component).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace riskprop {

using Address = std::string;

// Lowercases a hex account address and validates its shape (`0x` followed by
// at least one hex digit). Returns nullopt for anything else.
std::optional<Address> normalize_address(std::string_view raw);

// Non-negative integer amount in the smallest currency unit. Stored as a
// canonical decimal string because on-chain values overflow 64 bits.
class Amount {
public:
  Amount() : digits_("0") {}
  explicit Amount(std::uint64_t v) : digits_(std::to_string(v)) {}

  // Accepts base-10 digits only; leading zeros are stripped.
  static std::optional<Amount> parse(std::string_view text);

  bool is_zero() const noexcept { return digits_ == "0"; }
  const std::string& str() const noexcept { return digits_; }

  friend bool operator==(const Amount&, const Amount&) = default;

private:
  std::string digits_;
};

struct TransactionRecord {
  std::string tx_id;
  Address payer;
  Address payee;
  Amount value;
  std::optional<std::uint64_t> timestamp;

  friend bool operator==(const TransactionRecord&, const TransactionRecord&) = default;
};

// Header names for each field of a transactions file.
struct ColumnMapping {
  std::string tx = "tx";
  std::string payer = "from";
  std::string payee = "to";
  std::string value = "value";
  std::string timestamp = "timestamp";  // optional column
};

struct RowError {
  std::size_t line;
  std::string message;
};

struct TransactionParseResult {
  std::vector<TransactionRecord> records;
  std::vector<RowError> errors;  // one per skipped row
};

// Reads delimiter-separated text with a header row. Blank lines and lines
// starting with '#' are ignored. Throws ParseError when a required column is
// missing from the header; bad rows are skipped and listed in `errors`.
TransactionParseResult parse_transactions(std::istream& in, const ColumnMapping& columns = {},
                                          char delimiter = ',');

// Keeps records with value > 0 in their original order.
std::vector<TransactionRecord> filter_zero_value(std::vector<TransactionRecord> records);

// Keeps the records inside the largest weakly connected component of the
// undirected account graph. Equal-size components are ranked by their
// smallest member address.
std::vector<TransactionRecord> extract_largest_wcc(const std::vector<TransactionRecord>& records);

void write_transactions(std::ostream& out, const std::vector<TransactionRecord>& records);

enum class Category {
  kIcoWallet,
  kConverter,
  kMining,
  kExchange,
  kGambling,
  kPhishHack,
  kLicitOther,
};

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view text);
inline bool is_illicit(Category c) { return c == Category::kPhishHack; }

class LabelTable {
public:
  // Returns true if an existing entry was replaced.
  bool set(const Address& address, Category category);
  std::optional<Category> find(const Address& address) const;

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::map<Address, Category>& entries() const noexcept { return entries_; }

private:
  std::map<Address, Category> entries_;
};

struct LabelParseResult {
  LabelTable labels;
  std::vector<RowError> warnings;  // duplicate addresses, last write wins
};

// Two-column `address,category` text with a header row. An unknown category
// or malformed address throws ParseError naming the offending line.
LabelParseResult parse_labels(std::istream& in);

void write_labels(std::ostream& out, const LabelTable& labels);

}  // namespace riskprop
