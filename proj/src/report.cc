// Copyright 2026 The cote Authors.
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

#include <cstdio>
#include <sstream>

#include "cote/error.h"
#include "cote/evaluator.h"
#include "json_util.h"

namespace cote {
namespace {

std::string fixed(double v, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, v);
  return buffer;
}

std::string percent(const std::optional<double>& jga) {
  return jga ? fixed(100.0 * *jga, 2) : "n/a";
}

std::string_view axis_title(BucketAxis axis) {
  switch (axis) {
    case BucketAxis::kStep:
      return "Reasoning steps";
    case BucketAxis::kTurn:
      return "Dialogue turns";
    case BucketAxis::kLen:
      return "Average utterance length";
  }
  return "";
}

ordered_json report_json(const EvalReport& report) {
  ordered_json j;
  j["overall_jga"] = report.overall_jga;
  j["n_dialogues"] = report.n_dialogues;
  j["n_turns"] = report.n_turns;
  j["n_correct"] = report.n_correct;
  j["n_missing_predictions"] = report.n_missing_predictions;
  ordered_json axes = ordered_json::array();
  for (const auto& axis : report.per_bucket) {
    ordered_json ja;
    ja["axis"] = std::string(axis_name(axis.axis));
    ordered_json buckets = ordered_json::array();
    for (const auto& b : axis.buckets) {
      ordered_json jb;
      jb["label"] = b.range.label;
      jb["lo"] = b.range.lo;
      if (b.range.hi) {
        jb["hi"] = *b.range.hi;
      } else {
        jb["hi"] = nullptr;
      }
      jb["n_turns"] = b.n_turns;
      jb["n_correct"] = b.n_correct;
      if (b.jga) {
        jb["jga"] = *b.jga;
      } else {
        jb["jga"] = nullptr;
      }
      buckets.push_back(std::move(jb));
    }
    ja["buckets"] = std::move(buckets);
    axes.push_back(std::move(ja));
  }
  j["per_bucket"] = std::move(axes);
  j["policy"] = ordered_json::parse(policy_to_json(report.policy));
  return j;
}

std::string render_markdown(const EvalReport& report) {
  std::ostringstream out;
  out << "# Joint goal accuracy\n\n";
  out << "| metric | value |\n|---|---:|\n";
  out << "| JGA (%) | " << percent(report.overall_jga) << " |\n";
  out << "| dialogues | " << report.n_dialogues << " |\n";
  out << "| turns | " << report.n_turns << " |\n";
  out << "| correct turns | " << report.n_correct << " |\n";
  out << "| missing predictions | " << report.n_missing_predictions << " |\n";
  for (const auto& axis : report.per_bucket) {
    out << "\n## " << axis_title(axis.axis) << " (" << axis_name(axis.axis)
        << ")\n\n";
    out << "| bucket | turns | correct | JGA (%) |\n|---|---:|---:|---:|\n";
    for (const auto& b : axis.buckets) {
      out << "| " << axis_name(axis.axis) << "=" << b.range.label << " | "
          << b.n_turns << " | " << b.n_correct << " | " << percent(b.jga)
          << " |\n";
    }
  }
  return out.str();
}

std::string render_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "axis,bucket,lo,hi,n_turns,n_correct,jga\n";
  out << "overall,all,,," << report.n_turns << "," << report.n_correct << ","
      << fixed(report.overall_jga, 6) << "\n";
  for (const auto& axis : report.per_bucket) {
    for (const auto& b : axis.buckets) {
      out << axis_name(axis.axis) << "," << b.range.label << ","
          << b.range.lo << ",";
      if (b.range.hi) out << *b.range.hi;
      out << "," << b.n_turns << "," << b.n_correct << ","
          << (b.jga ? fixed(*b.jga, 6) : "NA") << "\n";
    }
  }
  return out.str();
}

}  // namespace

ReportFormat parse_report_format(std::string_view text) {
  if (text == "json") return ReportFormat::kJson;
  if (text == "markdown" || text == "md") return ReportFormat::kMarkdown;
  if (text == "csv") return ReportFormat::kCsv;
  throw FormatError("unknown report format \"" + std::string(text) + "\"");
}

std::string render_report(const EvalReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kJson:
      return report_json(report).dump(2) + "\n";
    case ReportFormat::kMarkdown:
      return render_markdown(report);
    case ReportFormat::kCsv:
      return render_csv(report);
  }
  return "";
}

void emit_report(const EvalReport& report, ReportFormat format,
                 const std::filesystem::path& path) {
  write_file_atomic(path, render_report(report, format));
}

EvalReport parse_report(std::string_view json_text, std::string_view origin) {
  ordered_json j = parse_json(json_text, origin);
  JsonPath root(origin);
  require_object(j, root);
  auto count = [](const ordered_json& obj, std::string_view key,
                  const JsonPath& path) {
    long long v = get_int(require_field(obj, key, path), path.field(key));
    if (v < 0) throw FormatError(path.field(key).str() + ": negative count");
    return static_cast<std::size_t>(v);
  };
  EvalReport report;
  report.overall_jga = get_number(require_field(j, "overall_jga", root),
                                  root.field("overall_jga"));
  report.n_dialogues = count(j, "n_dialogues", root);
  report.n_turns = count(j, "n_turns", root);
  report.n_correct = count(j, "n_correct", root);
  report.n_missing_predictions = count(j, "n_missing_predictions", root);
  JsonPath ap = root.field("per_bucket");
  const ordered_json& axes = require_field(j, "per_bucket", root);
  require_array(axes, ap);
  for (std::size_t a = 0; a < axes.size(); ++a) {
    JsonPath p = ap.index(a);
    require_object(axes[a], p);
    AxisReport axis;
    try {
      axis.axis = parse_axis(
          get_string(require_field(axes[a], "axis", p), p.field("axis")));
    } catch (const FormatError& e) {
      throw FormatError(p.field("axis").str() + ": " + e.what());
    }
    JsonPath bp = p.field("buckets");
    const ordered_json& buckets = require_field(axes[a], "buckets", p);
    require_array(buckets, bp);
    for (std::size_t b = 0; b < buckets.size(); ++b) {
      JsonPath q = bp.index(b);
      const ordered_json& jb = buckets[b];
      require_object(jb, q);
      BucketResult result;
      result.range.label =
          get_string(require_field(jb, "label", q), q.field("label"));
      result.range.lo = get_number(require_field(jb, "lo", q), q.field("lo"));
      const ordered_json& hi = require_field(jb, "hi", q);
      if (!hi.is_null()) result.range.hi = get_number(hi, q.field("hi"));
      result.n_turns = count(jb, "n_turns", q);
      result.n_correct = count(jb, "n_correct", q);
      const ordered_json& jga = require_field(jb, "jga", q);
      if (!jga.is_null()) result.jga = get_number(jga, q.field("jga"));
      axis.buckets.push_back(std::move(result));
    }
    report.per_bucket.push_back(std::move(axis));
  }
  report.policy = policy_from_json(
      require_field(j, "policy", root).dump(), root.field("policy").str());
  return report;
}

}  // namespace cote
