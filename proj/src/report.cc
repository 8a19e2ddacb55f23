// Copyright 2026 The imgvec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "imgvec/eval.h"

namespace imgvec {

bool Report::HasErrors() const {
  for (const auto &row : rows) {
    for (const auto &cell : row.cells) {
      if (!cell.error.empty()) return true;
    }
  }
  return false;
}

std::string FormatScore(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  std::string text(buf);
  if (text == "-0.00") text = "0.00";
  if (text.rfind("0.", 0) == 0) {
    text.erase(0, 1);
  } else if (text.rfind("-0.", 0) == 0) {
    text.erase(1, 1);
  }
  return text;
}

std::string FormatCell(const ScoredResult &result) {
  return FormatScore(result.score) + " [" + FormatScore(result.coverage) + "]";
}

namespace {

std::string CellText(const ReportCell &cell) {
  if (!cell.error.empty()) return "error";
  if (!cell.result) return "-";
  return FormatCell(*cell.result);
}

std::string CsvField(const std::string &text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

std::string Number(double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

}  // namespace

void EmitReportText(std::ostream &out, const Report &report) {
  const size_t ncols = report.columns.size();
  std::vector<size_t> width(ncols + 1, 0);
  for (const auto &row : report.rows) {
    width[0] = std::max(width[0], row.name.size());
  }
  for (size_t c = 0; c < ncols; ++c) {
    width[c + 1] = report.columns[c].size();
    for (const auto &row : report.rows) {
      if (c < row.cells.size()) {
        width[c + 1] = std::max(width[c + 1], CellText(row.cells[c]).size());
      }
    }
  }
  auto pad = [&out](const std::string &text, size_t w) {
    out << text << std::string(w - std::min(w, text.size()), ' ');
  };

  pad("", width[0]);
  for (size_t c = 0; c < ncols; ++c) {
    out << "  ";
    pad(report.columns[c], width[c + 1]);
  }
  out << '\n';
  for (const auto &row : report.rows) {
    pad(row.name, width[0]);
    for (size_t c = 0; c < ncols; ++c) {
      out << "  ";
      pad(c < row.cells.size() ? CellText(row.cells[c]) : "-", width[c + 1]);
    }
    out << '\n';
  }
  for (const auto &row : report.rows) {
    for (size_t c = 0; c < row.cells.size() && c < ncols; ++c) {
      if (!row.cells[c].error.empty()) {
        out << "error [" << row.name << " / " << report.columns[c]
            << "]: " << row.cells[c].error << '\n';
      }
    }
  }
}

void EmitReportCsv(std::ostream &out, const Report &report) {
  out << "name,column,score,coverage,n_used,n_total,token_coverage,error\n";
  for (const auto &row : report.rows) {
    for (size_t c = 0; c < row.cells.size() && c < report.columns.size();
         ++c) {
      const auto &cell = row.cells[c];
      out << CsvField(row.name) << ',' << CsvField(report.columns[c]) << ',';
      if (cell.result) {
        const auto &r = *cell.result;
        out << Number(r.score) << ',' << Number(r.coverage) << ',' << r.n_used
            << ',' << r.n_total << ',';
        if (r.token_coverage) out << Number(*r.token_coverage);
      } else {
        out << ",,,,";
      }
      out << ',' << CsvField(cell.error) << '\n';
    }
  }
}

}  // namespace imgvec
