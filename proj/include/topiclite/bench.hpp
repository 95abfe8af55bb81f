#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "topiclite/corpus.hpp"
#include "topiclite/errors.hpp"
#include "topiclite/eval.hpp"
#include "topiclite/lda.hpp"
#include "topiclite/log.hpp"
#include "topiclite/summarize.hpp"
#include "topiclite/util.hpp"

namespace topiclite {

struct ExperimentGrid {
  std::vector<System> systems;
  std::vector<int> topic_counts = {5, 10, 50, 100, 200, 400};
  std::vector<double> rates = {0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<std::uint64_t> seeds = {0};
  double split_ratio = 0.9;
  double alpha = 0.0;  // <= 0 means 50/K
  double beta = 0.01;
  int iterations = 1000;
  int burn_in = 500;
  int sample_lag = 50;
  int fold_sweeps = 50;

  void validate() const {
    if (systems.empty()) throw ConfigError("grid: systems list is empty");
    if (topic_counts.empty()) throw ConfigError("grid: topic_counts is empty");
    if (seeds.empty()) throw ConfigError("grid: seeds list is empty");
    const bool only_full =
        std::all_of(systems.begin(), systems.end(),
                    [](System s) { return s == System::full; });
    if (rates.empty() && !only_full) throw ConfigError("grid: rates is empty");
    for (double r : rates) {
      if (!(r > 0.0 && r <= 1.0)) throw ConfigError("grid: rate out of (0,1]");
    }
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
      throw ConfigError("grid: split_ratio out of (0,1)");
    }
    Hyperparameters hyper;
    hyper.topics = topic_counts.front();
    hyper.alpha = alpha;
    hyper.beta = beta;
    hyper.iterations = iterations;
    hyper.burn_in = burn_in;
    hyper.sample_lag = sample_lag;
    hyper.validate();
    if (fold_sweeps < 0) throw ConfigError("grid: fold_sweeps must be >= 0");
  }
};

// One grid cell's scores and timings. A nonempty error marks a failed cell;
// score fields are then meaningless.
struct RunRecord {
  System system = System::full;
  int topics = 0;  // K
  double rate = 1.0;
  std::uint64_t seed = 0;
  double summarize_time_s = 0.0;
  double train_time_s = 0.0;
  double perplexity = 0.0;
  double js_total = 0.0;
  std::size_t n_train_tokens = 0;
  std::string error;

  bool ok() const { return error.empty(); }
};

namespace detail {

constexpr std::uint64_t kBrSeedTag = 0x62722d73u;

// Training documents restricted to the selected sentences, re-indexed into a
// fresh vocabulary. to_sub maps corpus word ids into it (kUnkId = absent),
// which is also how test documents are later mapped.
struct SubCorpus {
  std::vector<std::vector<std::int32_t>> docs;
  Vocabulary vocabulary;
  std::vector<std::int32_t> to_sub;
  std::size_t n_tokens = 0;
};

inline SubCorpus build_subcorpus(
    const Corpus& corpus, const std::vector<std::size_t>& train_indices,
    const std::vector<std::vector<std::size_t>>& selected_per_doc) {
  SubCorpus sub;
  sub.to_sub.assign(corpus.vocabulary.size(), kUnkId);
  sub.docs.reserve(train_indices.size());
  for (std::size_t t = 0; t < train_indices.size(); ++t) {
    const Document& doc = corpus.documents[train_indices[t]];
    std::vector<std::int32_t> flat;
    std::set<std::int32_t> distinct;
    for (auto sentence_idx : selected_per_doc[t]) {
      for (auto id : doc.sentences[sentence_idx].tokens) {
        std::int32_t& mapped = sub.to_sub[static_cast<std::size_t>(id)];
        const std::string& word = corpus.vocabulary.reverse(id);
        const std::int32_t sub_id = sub.vocabulary.add_occurrence(word);
        if (mapped == kUnkId) mapped = sub_id;
        flat.push_back(sub_id);
        distinct.insert(sub_id);
      }
    }
    sub.vocabulary.count_document(distinct);
    sub.n_tokens += flat.size();
    sub.docs.push_back(std::move(flat));
  }
  return sub;
}

inline std::vector<std::int32_t> map_test_doc(const Document& doc,
                                              const std::vector<std::int32_t>& to_sub) {
  std::vector<std::int32_t> out;
  out.reserve(doc.token_count());
  for (const auto& s : doc.sentences) {
    for (auto id : s.tokens) out.push_back(to_sub[static_cast<std::size_t>(id)]);
  }
  return out;
}

}  // namespace detail

// Runs every (system, K, rate, seed) cell: summarize the train split, train,
// score held-out perplexity and topic divergence, and time summarization and
// training separately with a monotonic clock. Failed cells become records
// with an error string; the grid continues.
inline std::vector<RunRecord> run_grid(const Corpus& corpus,
                                       const ExperimentGrid& grid,
                                       unsigned threads = 1) {
  grid.validate();
  const SplitSpec split =
      split_corpus(corpus, grid.split_ratio, grid.seeds.front());
  if (split.test_indices.empty()) {
    throw ConfigError("run_grid: split produced an empty test set");
  }

  struct Cell {
    System system;
    int topics;
    double rate;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (System system : grid.systems) {
    for (int k : grid.topic_counts) {
      if (system == System::full) {
        for (auto seed : grid.seeds) cells.push_back({system, k, 1.0, seed});
      } else {
        for (double rate : grid.rates) {
          for (auto seed : grid.seeds) cells.push_back({system, k, rate, seed});
        }
      }
    }
  }

  std::vector<RunRecord> records(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t idx) {
    const Cell& cell = cells[idx];
    RunRecord rec;
    rec.system = cell.system;
    rec.topics = cell.topics;
    rec.rate = cell.rate;
    rec.seed = cell.seed;
    try {
      using clock = std::chrono::steady_clock;

      std::vector<std::vector<std::size_t>> selected(split.train_indices.size());
      const auto t0 = clock::now();
      if (cell.system == System::full) {
        for (std::size_t t = 0; t < split.train_indices.size(); ++t) {
          const auto p =
              corpus.documents[split.train_indices[t]].sentences.size();
          selected[t].resize(p);
          std::iota(selected[t].begin(), selected[t].end(), std::size_t{0});
        }
      } else {
        const CompressionRate rate(cell.rate);
        for (std::size_t t = 0; t < split.train_indices.size(); ++t) {
          const Document& doc = corpus.documents[split.train_indices[t]];
          const auto doc_seed =
              rng::derive_seed(cell.seed, detail::kBrSeedTag, t);
          selected[t] = summarize(cell.system, doc, rate, doc_seed).selected;
        }
      }
      detail::SubCorpus sub =
          detail::build_subcorpus(corpus, split.train_indices, selected);
      const auto t1 = clock::now();
      rec.summarize_time_s =
          cell.system == System::full
              ? 0.0
              : std::chrono::duration<double>(t1 - t0).count();
      rec.n_train_tokens = sub.n_tokens;

      Hyperparameters hyper;
      hyper.topics = cell.topics;
      hyper.alpha = grid.alpha;
      hyper.beta = grid.beta;
      hyper.iterations = grid.iterations;
      hyper.burn_in = grid.burn_in;
      hyper.sample_lag = grid.sample_lag;
      hyper.seed = cell.seed;
      const int sub_vocab = static_cast<int>(sub.vocabulary.size());
      TopicModel model = train_tokens(std::move(sub.docs), sub_vocab,
                                      std::move(sub.vocabulary), hyper);
      rec.train_time_s = model.info.wall_time_s;

      std::vector<std::vector<std::int32_t>> test_docs;
      test_docs.reserve(split.test_indices.size());
      for (auto di : split.test_indices) {
        test_docs.push_back(
            detail::map_test_doc(corpus.documents[di], sub.to_sub));
      }
      rec.perplexity =
          perplexity(model, test_docs, grid.fold_sweeps, cell.seed).perplexity;
      rec.js_total = js_model(model).total;
      log_info("cell %s K=%d rate=%g seed=%llu: perplexity=%.2f js=%.2f "
               "summarize=%.2fs train=%.2fs",
               system_name(cell.system), cell.topics, cell.rate,
               static_cast<unsigned long long>(cell.seed), rec.perplexity,
               rec.js_total, rec.summarize_time_s, rec.train_time_s);
    } catch (const std::exception& e) {
      rec.error = e.what();
      log_warn("cell %s K=%d rate=%g seed=%llu failed: %s",
               system_name(cell.system), cell.topics, cell.rate,
               static_cast<unsigned long long>(cell.seed), e.what());
    }
    records[idx] = std::move(rec);
  });
  return records;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

enum class GroupBy { topics, rate };

struct AggregateRow {
  double group = 0.0;  // K or rate
  System system = System::full;
  std::size_t n_records = 0;
  double mean_perplexity = 0.0;
  double mean_js_total = 0.0;
  double mean_summarize_time_s = 0.0;
  double mean_train_time_s = 0.0;
  double mean_n_train_tokens = 0.0;
};

// Per-system means across the non-grouped axis. Failed records are excluded;
// groups with no successful record are dropped with a warning.
inline std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records,
                                           GroupBy group_by) {
  std::map<std::pair<double, System>, std::vector<const RunRecord*>> groups;
  std::size_t failed = 0;
  for (const auto& rec : records) {
    if (!rec.ok()) {
      ++failed;
      continue;
    }
    const double key =
        group_by == GroupBy::topics ? static_cast<double>(rec.topics) : rec.rate;
    groups[{key, rec.system}].push_back(&rec);
  }
  if (failed > 0) {
    log_warn("aggregate: %zu failed record(s) excluded", failed);
  }
  std::vector<AggregateRow> rows;
  for (const auto& [key, recs] : groups) {
    AggregateRow row;
    row.group = key.first;
    row.system = key.second;
    row.n_records = recs.size();
    for (const auto* r : recs) {
      row.mean_perplexity += r->perplexity;
      row.mean_js_total += r->js_total;
      row.mean_summarize_time_s += r->summarize_time_s;
      row.mean_train_time_s += r->train_time_s;
      row.mean_n_train_tokens += static_cast<double>(r->n_train_tokens);
    }
    const auto n = static_cast<double>(recs.size());
    row.mean_perplexity /= n;
    row.mean_js_total /= n;
    row.mean_summarize_time_s /= n;
    row.mean_train_time_s /= n;
    row.mean_n_train_tokens /= n;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace detail {

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

inline std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace detail

inline const char* kRecordsCsvHeader =
    "system,K,rate,seed,summarize_time_s,train_time_s,perplexity,js_total,"
    "n_train_tokens,error";

inline void emit_csv(const std::vector<RunRecord>& records,
                     const std::string& path) {
  if (records.empty()) throw ConfigError("emit_csv: no records");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << kRecordsCsvHeader << "\n";
  for (const auto& r : records) {
    out << system_name(r.system) << ',' << r.topics << ','
        << format_double(r.rate) << ',' << r.seed << ','
        << format_double(r.summarize_time_s) << ','
        << format_double(r.train_time_s) << ',' << format_double(r.perplexity)
        << ',' << format_double(r.js_total) << ',' << r.n_train_tokens << ','
        << detail::csv_quote(r.error) << "\n";
  }
  if (!out) throw IoError("failed while writing " + path);
}

inline std::vector<RunRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kRecordsCsvHeader) {
    throw DataError(path + ": bad records header");
  }
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::csv_split(line);
    if (f.size() != 10) throw DataError(path + ": bad record line");
    RunRecord r;
    const auto system = parse_system(f[0]);
    if (!system) throw DataError(path + ": unknown system " + f[0]);
    r.system = *system;
    r.topics = std::stoi(f[1]);
    r.rate = std::strtod(f[2].c_str(), nullptr);
    r.seed = std::stoull(f[3]);
    r.summarize_time_s = std::strtod(f[4].c_str(), nullptr);
    r.train_time_s = std::strtod(f[5].c_str(), nullptr);
    r.perplexity = std::strtod(f[6].c_str(), nullptr);
    r.js_total = std::strtod(f[7].c_str(), nullptr);
    r.n_train_tokens = std::stoull(f[8]);
    r.error = f[9];
    records.push_back(std::move(r));
  }
  return records;
}

inline void emit_aggregate_csv(const std::vector<AggregateRow>& rows,
                               GroupBy group_by, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << (group_by == GroupBy::topics ? "K" : "rate")
      << ",system,n_records,mean_perplexity,mean_js_total,"
         "mean_summarize_time_s,mean_train_time_s,mean_n_train_tokens\n";
  for (const auto& row : rows) {
    out << format_double(row.group) << ',' << system_name(row.system) << ','
        << row.n_records << ',' << format_double(row.mean_perplexity) << ','
        << format_double(row.mean_js_total) << ','
        << format_double(row.mean_summarize_time_s) << ','
        << format_double(row.mean_train_time_s) << ','
        << format_double(row.mean_n_train_tokens) << "\n";
  }
}

// ---------------------------------------------------------------------------
// SVG charts
// ---------------------------------------------------------------------------

struct ChartSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;  // sorted by x
};

// Standalone SVG line chart, one polyline per series.
inline void write_line_chart(const std::string& path, const std::string& title,
                             const std::string& x_label,
                             const std::string& y_label,
                             const std::vector<ChartSeries>& series) {
  static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b"};
  const double width = 640, height = 440;
  const double left = 80, right = width - 150, top = 50, bottom = height - 60;

  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  bool first = true;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (first) {
        x_min = x_max = x;
        y_min = y_max = y;
        first = false;
      }
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (x_max == x_min) {
    x_min -= 1;
    x_max += 1;
  }
  if (y_max == y_min) {
    y_min -= 1;
    y_max += 1;
  }
  const double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  auto sx = [&](double x) {
    return left + (x - x_min) / (x_max - x_min) * (right - left);
  };
  auto sy = [&](double y) {
    return bottom - (y - y_min) / (y_max - y_min) * (bottom - top);
  };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return std::string(buf);
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << (left + right) / 2 << "\" y=\"24\" font-size=\"16\" "
         "text-anchor=\"middle\" font-family=\"sans-serif\">"
      << title << "</text>\n";

  // axes
  out << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right
      << "\" y2=\"" << bottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
      << "\" y2=\"" << bottom << "\" stroke=\"black\"/>\n";
  const int ticks = 5;
  for (int t = 0; t <= ticks; ++t) {
    const double fx = x_min + (x_max - x_min) * t / ticks;
    const double fy = y_min + (y_max - y_min) * t / ticks;
    out << "<line x1=\"" << sx(fx) << "\" y1=\"" << bottom << "\" x2=\""
        << sx(fx) << "\" y2=\"" << bottom + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << sx(fx) << "\" y=\"" << bottom + 20
        << "\" font-size=\"11\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\">"
        << num(fx) << "</text>\n";
    out << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(fy) << "\" x2=\""
        << left << "\" y2=\"" << sy(fy) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << sy(fy) + 4
        << "\" font-size=\"11\" text-anchor=\"end\" "
           "font-family=\"sans-serif\">"
        << num(fy) << "</text>\n";
  }
  out << "<text x=\"" << (left + right) / 2 << "\" y=\"" << height - 16
      << "\" font-size=\"13\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\">"
      << x_label << "</text>\n";
  out << "<text x=\"20\" y=\"" << (top + bottom) / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" transform=\"rotate(-90 20 "
      << (top + bottom) / 2 << ")\">" << y_label << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : series[s].points) {
      out << sx(x) << ',' << sy(y) << ' ';
    }
    out << "\"/>\n";
    for (const auto& [x, y] : series[s].points) {
      out << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y)
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = top + 10 + 18 * static_cast<double>(s);
    out << "<line x1=\"" << right + 10 << "\" y1=\"" << ly << "\" x2=\""
        << right + 30 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << right + 36 << "\" y=\"" << ly + 4
        << "\" font-size=\"12\" font-family=\"sans-serif\">" << series[s].name
        << "</text>\n";
  }
  out << "</svg>\n";
}

// One chart per (metric x grouping), one series per system.
inline void emit_plots(const std::vector<AggregateRow>& by_k,
                       const std::vector<AggregateRow>& by_rate,
                       const std::string& dir) {
  std::filesystem::create_directories(dir);
  struct Metric {
    const char* name;
    double AggregateRow::* field;
  };
  static const Metric kMetrics[] = {
      {"perplexity", &AggregateRow::mean_perplexity},
      {"js_total", &AggregateRow::mean_js_total},
      {"train_time_s", &AggregateRow::mean_train_time_s},
  };
  static const System kSystems[] = {System::full, System::bf, System::br,
                                    System::artex};

  auto emit = [&](const std::vector<AggregateRow>& rows, const char* group,
                  const std::string& x_label, const Metric& metric) {
    std::vector<ChartSeries> series;
    for (System system : kSystems) {
      ChartSeries cs;
      cs.name = system_name(system);
      for (const auto& row : rows) {
        if (row.system == system) {
          cs.points.emplace_back(row.group, row.*(metric.field));
        }
      }
      std::sort(cs.points.begin(), cs.points.end());
      if (!cs.points.empty()) series.push_back(std::move(cs));
    }
    if (series.empty()) return;
    const std::string name = std::string(metric.name) + "_by_" + group;
    write_line_chart(dir + "/" + name + ".svg", name, x_label, metric.name,
                     series);
  };
  for (const auto& metric : kMetrics) {
    emit(by_k, "k", "topics", metric);
    emit(by_rate, "rate", "compression rate", metric);
  }
}

// ---------------------------------------------------------------------------
// Published timing reference
// ---------------------------------------------------------------------------

// Training times (seconds) reported for 90,000-document Wikipedia corpora,
// keyed by (system, language, K). Used for side-by-side display only;
// hardware differs, so nothing is asserted against these.
inline std::optional<int> reference_train_seconds(System system, Language lang,
                                                  int topics) {
  struct Entry {
    System system;
    int topics;
    int seconds[3];  // en, es, fr
  };
  static const Entry kTable[] = {
      {System::full, 5, {1861, 1388, 1208}},
      {System::full, 10, {2127, 1731, 1362}},
      {System::full, 50, {4194, 2680, 2319}},
      {System::full, 100, {5288, 3413, 3323}},
      {System::full, 200, {6364, 4524, 4667}},
      {System::full, 400, {8654, 6625, 6751}},
      {System::artex, 5, {514, 448, 394}},
      {System::artex, 10, {607, 521, 438}},
      {System::artex, 50, {1051, 804, 709}},
      {System::artex, 100, {1565, 1303, 1039}},
      {System::artex, 200, {2536, 2076, 1573}},
      {System::artex, 400, {3404, 2853, 2073}},
      {System::br, 5, {318, 265, 238}},
      {System::br, 10, {349, 298, 288}},
      {System::br, 50, {466, 418, 465}},
      {System::br, 100, {652, 602, 548}},
      {System::br, 200, {919, 863, 838}},
      {System::br, 400, {1081, 988, 978}},
      {System::bf, 5, {466, 301, 276}},
      {System::bf, 10, {529, 348, 317}},
      {System::bf, 50, {1031, 727, 459}},
      {System::bf, 100, {1614, 737, 680}},
      {System::bf, 200, {2115, 814, 985}},
      {System::bf, 400, {2784, 1448, 988}},
  };
  int col;
  switch (lang) {
    case Language::en: col = 0; break;
    case Language::es: col = 1; break;
    case Language::fr: col = 2; break;
    default: return std::nullopt;
  }
  for (const auto& e : kTable) {
    if (e.system == system && e.topics == topics) return e.seconds[col];
  }
  return std::nullopt;
}

// Side-by-side view of measured training times against the published ones.
// Informational only: absolute times are not comparable across hardware.
inline std::string compare_reference(const std::vector<RunRecord>& records,
                                     Language lang) {
  const Language ref_lang = lang == Language::other ? Language::en : lang;
  std::map<std::pair<System, int>, std::pair<double, std::size_t>> measured;
  for (const auto& r : records) {
    if (!r.ok()) continue;
    auto& [sum, n] = measured[{r.system, r.topics}];
    sum += r.train_time_s;
    ++n;
  }

  std::ostringstream out;
  out << "reference training times (" << language_name(ref_lang)
      << " column), published for 90,000 Wikipedia documents;\n"
         "measured values are means over this run's grid cells. hardware and "
         "corpus scale differ,\nso ratios are context, not a check.\n\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-8s %6s %14s %14s %16s\n", "system", "K",
                "published_s", "measured_s", "measured/published");
  out << buf;
  for (System system : {System::full, System::bf, System::br, System::artex}) {
    for (const auto& [key, agg] : measured) {
      if (key.first != system) continue;
      const auto ref = reference_train_seconds(system, ref_lang, key.second);
      const double mean = agg.first / static_cast<double>(agg.second);
      if (ref) {
        std::snprintf(buf, sizeof(buf), "%-8s %6d %14d %14.2f %16.4f\n",
                      system_name(system), key.second, *ref, mean,
                      mean / *ref);
      } else {
        std::snprintf(buf, sizeof(buf), "%-8s %6d %14s %14.2f %16s\n",
                      system_name(system), key.second, "-", mean, "-");
      }
      out << buf;
    }
  }

  auto full_mean = [&](int topics) -> std::optional<double> {
    auto it = measured.find({System::full, topics});
    if (it == measured.end()) return std::nullopt;
    return it->second.first / static_cast<double>(it->second.second);
  };
  out << "\ntraining-time fraction of full text (same K):\n";
  std::snprintf(buf, sizeof(buf), "%-8s %6s %14s %14s\n", "system", "K",
                "published", "measured");
  out << buf;
  for (System system : {System::bf, System::br, System::artex}) {
    for (const auto& [key, agg] : measured) {
      if (key.first != system) continue;
      const auto ref_sys = reference_train_seconds(system, ref_lang, key.second);
      const auto ref_full =
          reference_train_seconds(System::full, ref_lang, key.second);
      const auto full = full_mean(key.second);
      const double mean = agg.first / static_cast<double>(agg.second);
      std::string published = "-", measured_str = "-";
      if (ref_sys && ref_full) {
        std::snprintf(buf, sizeof(buf), "%.4f",
                      static_cast<double>(*ref_sys) / *ref_full);
        published = buf;
      }
      if (full && *full > 0.0) {
        std::snprintf(buf, sizeof(buf), "%.4f", mean / *full);
        measured_str = buf;
      }
      std::snprintf(buf, sizeof(buf), "%-8s %6d %14s %14s\n",
                    system_name(system), key.second, published.c_str(),
                    measured_str.c_str());
      out << buf;
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Config file and end-to-end driver
// ---------------------------------------------------------------------------

struct BenchConfig {
  std::string input;
  Language language = Language::en;
  ExperimentGrid grid;
  std::string out_dir;
};

inline BenchConfig load_bench_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": invalid JSON: " + std::string(e.what()));
  }
  static const std::set<std::string> kKnown = {
      "input",      "language", "systems", "topic_counts", "rates",
      "seeds",      "split_ratio", "alpha", "beta",        "iterations",
      "burn_in",    "sample_lag",  "fold_sweeps", "out_dir"};
  for (const auto& [key, value] : obj.items()) {
    if (kKnown.count(key) == 0) {
      throw ConfigError(path + ": unknown config key \"" + key + "\"");
    }
  }
  BenchConfig config;
  try {
    config.input = obj.at("input").get<std::string>();
    config.out_dir = obj.at("out_dir").get<std::string>();
    if (obj.contains("language")) {
      const auto lang = parse_language(obj.at("language").get<std::string>());
      if (!lang) throw ConfigError(path + ": unknown language");
      config.language = *lang;
    }
    if (!obj.contains("systems")) {
      throw ConfigError(path + ": missing \"systems\"");
    }
    config.grid.systems.clear();
    for (const auto& name : obj.at("systems")) {
      const auto system = parse_system(name.get<std::string>());
      if (!system) {
        throw ConfigError(path + ": unknown system \"" +
                          name.get<std::string>() + "\"");
      }
      config.grid.systems.push_back(*system);
    }
    if (obj.contains("topic_counts")) {
      config.grid.topic_counts = obj.at("topic_counts").get<std::vector<int>>();
    }
    if (obj.contains("rates")) {
      config.grid.rates = obj.at("rates").get<std::vector<double>>();
    }
    if (obj.contains("seeds")) {
      config.grid.seeds = obj.at("seeds").get<std::vector<std::uint64_t>>();
    }
    if (obj.contains("split_ratio")) {
      config.grid.split_ratio = obj.at("split_ratio").get<double>();
    }
    if (obj.contains("alpha")) config.grid.alpha = obj.at("alpha").get<double>();
    if (obj.contains("beta")) config.grid.beta = obj.at("beta").get<double>();
    if (obj.contains("iterations")) {
      config.grid.iterations = obj.at("iterations").get<int>();
    }
    if (obj.contains("burn_in")) {
      config.grid.burn_in = obj.at("burn_in").get<int>();
    }
    if (obj.contains("sample_lag")) {
      config.grid.sample_lag = obj.at("sample_lag").get<int>();
    }
    if (obj.contains("fold_sweeps")) {
      config.grid.fold_sweeps = obj.at("fold_sweeps").get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + std::string(e.what()));
  }
  config.grid.validate();
  return config;
}

// Runs the grid over an already-built corpus and writes records.csv,
// aggregate CSVs, plots and the reference comparison into out_dir.
inline std::vector<RunRecord> run_bench(const Corpus& corpus,
                                        const ExperimentGrid& grid,
                                        Language language,
                                        const std::string& out_dir,
                                        unsigned threads = 1) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());

  const auto records = run_grid(corpus, grid, threads);
  emit_csv(records, out_dir + "/records.csv");
  const auto by_k = aggregate(records, GroupBy::topics);
  const auto by_rate = aggregate(records, GroupBy::rate);
  emit_aggregate_csv(by_k, GroupBy::topics, out_dir + "/aggregate_by_k.csv");
  emit_aggregate_csv(by_rate, GroupBy::rate, out_dir + "/aggregate_by_rate.csv");
  emit_plots(by_k, by_rate, out_dir + "/plots");
  std::ofstream ref(out_dir + "/reference_comparison.txt", std::ios::binary);
  if (!ref) throw IoError("cannot write reference_comparison.txt");
  ref << compare_reference(records, language);
  return records;
}

}  // namespace topiclite
