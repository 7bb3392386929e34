// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#include "gap/heatmap.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "gap/error.hpp"

namespace gap {

namespace {

const Matrix& layer_of(const AttentionTrace& trace, std::size_t layer) {
  if (layer >= trace.layers.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "trace has " + std::to_string(trace.layers.size()) + " layers");
  }
  return trace.layers[layer];
}

std::string row_label(const AttentionTrace& t, std::size_t i) {
  return (t.kinds[i] == ComponentKind::Entity ? "E " : "R ") + t.labels[i];
}

std::string numbered_label(const AttentionTrace& t, std::size_t i) {
  return std::to_string(i) + " " + row_label(t, i);
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_text(const AttentionTrace& trace, std::size_t layer) {
  const Matrix& w = layer_of(trace, layer);
  const std::size_t m = trace.labels.size();
  std::size_t width = 0;
  for (std::size_t i = 0; i < m; ++i) width = std::max(width, numbered_label(trace, i).size());

  std::ostringstream out;
  out << "layer " << layer << "  scheme " << trace.scheme << "  type_encoding "
      << (trace.type_encoding ? "on" : "off") << '\n';
  out << std::string(width, ' ');
  for (std::size_t j = 0; j < m; ++j) {
    char buf[32];
    std::snprintf(buf, sizeof buf, " %5zu", j);
    out << buf;
  }
  out << '\n';
  for (std::size_t i = 0; i < m; ++i) {
    const std::string label = numbered_label(trace, i);
    out << label << std::string(width - label.size(), ' ');
    for (std::size_t j = 0; j < m; ++j) {
      if (i < trace.blocked_rows.size() && trace.blocked_rows[i]) {
        out << "     -";
      } else {
        char buf[32];
        std::snprintf(buf, sizeof buf, " %5.3f", w(i, j));
        out << buf;
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string render_svg(const AttentionTrace& trace, std::size_t layer) {
  const Matrix& w = layer_of(trace, layer);
  const std::size_t m = trace.labels.size();
  constexpr int kCell = 24;
  constexpr int kMargin = 180;
  const int size = kMargin + static_cast<int>(m) * kCell + 10;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\">\n";
  out << "<text x=\"4\" y=\"14\" font-family=\"monospace\" font-size=\"11\">layer " << layer << " "
      << xml_escape(trace.scheme) << (trace.type_encoding ? " +type" : "") << "</text>\n";
  for (std::size_t i = 0; i < m; ++i) {
    const int pos = kMargin + static_cast<int>(i) * kCell;
    const std::string label = xml_escape(row_label(trace, i));
    out << "<text x=\"4\" y=\"" << pos + kCell / 2 + 4 << "\" font-family=\"monospace\" font-size=\"10\">"
        << label << "</text>\n";
    out << "<text transform=\"translate(" << pos + kCell / 2 + 4 << "," << kMargin - 4
        << ") rotate(-90)\" font-family=\"monospace\" font-size=\"10\">" << label << "</text>\n";
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double v = std::clamp(w(i, j), 0.0, 1.0);
      const int shade = static_cast<int>(255.0 * (1.0 - v) + 0.5);
      out << "<rect x=\"" << kMargin + static_cast<int>(j) * kCell << "\" y=\""
          << kMargin + static_cast<int>(i) * kCell << "\" width=\"" << kCell << "\" height=\"" << kCell
          << "\" fill=\"rgb(" << shade << "," << shade << ",255)\" stroke=\"#ccc\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace gap
