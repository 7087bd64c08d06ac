// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace triage::csv {

using Row = std::vector<std::string>;

struct Table {
  Row header;
  std::vector<Row> rows;
  // 1-based line number where each row starts, for error messages.
  std::vector<std::size_t> lines;

  // Index of a header column or -1.
  int column(std::string_view name) const;
};

// RFC-4180 reader: comma separator, double-quote quoting with "" escapes,
// CRLF or LF line endings, quoted fields may span lines. A UTF-8 BOM is skipped.
// Throws ValidationError on an unterminated quote or an empty document.
Table parse(std::string_view text);

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);
std::string format_row(const Row& row);  // without trailing newline

}  // namespace triage::csv
