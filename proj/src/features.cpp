// Copyright 2026 The ctrscode Authors.
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

#include "ctrs/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "ctrs/errors.hpp"
#include "ctrs/text.hpp"

namespace ctrs {

namespace {

constexpr double kDfSlack = 1e-12;

std::uint64_t fnv1a(std::uint64_t h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* kDigits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
    v >>= 4;
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Provenance parse_provenance(std::string_view s) {
  if (s == "tfidf") return Provenance::kTfidf;
  if (s == "tag_counts") return Provenance::kTagCounts;
  if (s == "augmented_tfidf") return Provenance::kAugmentedTfidf;
  if (s == "concat") return Provenance::kConcat;
  throw ValidationError("unknown provenance '" + std::string(s) + "'");
}

}  // namespace

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kTfidf: return "tfidf";
    case Provenance::kTagCounts: return "tag_counts";
    case Provenance::kAugmentedTfidf: return "augmented_tfidf";
    case Provenance::kConcat: return "concat";
  }
  return "?";
}

std::string FeatureSpace::id() const {
  std::uint64_t h = 1469598103934665603ull;
  h = fnv1a(h, provenance_name(provenance));
  h = fnv1a(h, corpus_id);
  for (const auto& n : names) h = fnv1a(fnv1a(h, n), "\x1f");
  for (double v : idf) h = fnv1a(h, format_double(v));
  return hex64(h);
}

std::vector<bool> FeatureSpace::selectable_mask() const {
  std::vector<bool> mask(dim(), true);
  for (const auto& b : blocks) {
    for (std::size_t j = b.offset; j < b.offset + b.size && j < dim(); ++j)
      mask[j] = b.selectable;
  }
  return mask;
}

Json FeatureSpace::to_json() const {
  Json doc = artifact_envelope("feature_space", 0);
  doc["space_id"] = id();
  doc["provenance"] = std::string(provenance_name(provenance));
  doc["corpus_id"] = corpus_id;
  doc["num_documents"] = num_documents;
  doc["max_df"] = max_df;
  doc["min_df"] = min_df;
  Json blocks_json = Json::array();
  for (const auto& b : blocks) {
    blocks_json.push_back(Json{{"prefix", b.prefix},
                               {"provenance", std::string(provenance_name(b.provenance))},
                               {"offset", b.offset},
                               {"size", b.size},
                               {"selectable", b.selectable}});
  }
  doc["blocks"] = std::move(blocks_json);
  doc["names"] = names;
  doc["df"] = df;
  doc["idf"] = idf;
  return doc;
}

FeatureSpace FeatureSpace::from_json(const Json& doc) {
  check_artifact(doc, "feature_space");
  FeatureSpace s;
  s.provenance = parse_provenance(doc.at("provenance").get<std::string>());
  s.corpus_id = doc.at("corpus_id").get<std::string>();
  s.num_documents = doc.at("num_documents").get<std::size_t>();
  s.max_df = doc.at("max_df").get<double>();
  s.min_df = doc.at("min_df").get<double>();
  for (const auto& b : doc.at("blocks")) {
    s.blocks.push_back({b.at("prefix").get<std::string>(),
                        parse_provenance(b.at("provenance").get<std::string>()),
                        b.at("offset").get<std::size_t>(),
                        b.at("size").get<std::size_t>(),
                        b.at("selectable").get<bool>()});
  }
  s.names = doc.at("names").get<std::vector<std::string>>();
  s.df = doc.at("df").get<std::vector<int>>();
  s.idf = doc.at("idf").get<std::vector<double>>();
  if (s.id() != doc.at("space_id").get<std::string>()) {
    throw ValidationError("feature space fingerprint mismatch");
  }
  return s;
}

double SparseFeatureVector::l2_norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

std::string corpus_fingerprint(const std::vector<std::string>& session_ids) {
  std::vector<std::string> sorted = session_ids;
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& id : sorted) h = fnv1a(fnv1a(h, id), "\x1e");
  return hex64(h);
}

SpacePtr fit_tfidf(const std::vector<std::vector<std::string>>& documents,
                   double max_df, double min_df, Provenance provenance,
                   std::string corpus_id) {
  if (documents.empty()) throw ValidationError("fit_tfidf: no documents");
  if (!(min_df >= 0.0 && min_df < max_df && max_df <= 1.0)) {
    throw ValidationError("fit_tfidf: need 0 <= min_df < max_df <= 1");
  }
  std::map<std::string, int> df;
  for (const auto& doc : documents) {
    std::vector<std::string> uniq = doc;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (const auto& t : uniq) ++df[t];
  }
  auto space = std::make_shared<FeatureSpace>();
  const double n = static_cast<double>(documents.size());
  space->num_documents = documents.size();
  space->max_df = max_df;
  space->min_df = min_df;
  space->provenance = provenance;
  space->corpus_id = std::move(corpus_id);
  for (const auto& [term, count] : df) {
    const double frac = static_cast<double>(count) / n;
    if (frac < min_df - kDfSlack || frac > max_df + kDfSlack) continue;
    space->names.push_back(term);
    space->df.push_back(count);
    space->idf.push_back(std::log((1.0 + n) / (1.0 + count)) + 1.0);
  }
  if (space->names.empty()) {
    throw ValidationError(
        "fit_tfidf: vocabulary is empty after df pruning; widen max_df/min_df");
  }
  space->blocks.push_back({std::string(provenance_name(provenance)), provenance, 0,
                           space->names.size(), true});
  return space;
}

SparseFeatureVector transform_tfidf(const std::vector<std::string>& document,
                                    const SpacePtr& space) {
  SparseFeatureVector v;
  v.space = space;
  std::map<std::size_t, double> counts;
  for (const auto& t : document) {
    auto it = std::lower_bound(space->names.begin(), space->names.end(), t);
    if (it != space->names.end() && *it == t)
      counts[static_cast<std::size_t>(it - space->names.begin())] += 1.0;
  }
  double sq = 0.0;
  for (auto& [idx, c] : counts) {
    c *= space->idf[idx];
    sq += c * c;
  }
  const double norm = std::sqrt(sq);
  for (const auto& [idx, c] : counts) {
    v.indices.push_back(idx);
    v.values.push_back(c / norm);
  }
  return v;
}

TagFeatureBlock tag_count_features(const std::vector<TaggedUtterance>& tagged,
                                   Scheme scheme,
                                   std::optional<std::size_t> word_total) {
  const TagSet& tags = TagSet::for_scheme(scheme);
  TagFeatureBlock block;
  block.scheme = scheme;
  std::array<double, 7> utt{}, words{};
  std::size_t n_words = 0;
  for (const auto& t : tagged) {
    const auto& label = scheme == Scheme::kDialogAct ? t.da : t.mc;
    if (!label) throw ValidationError("tag_count_features: untagged utterance");
    const std::size_t j = tags.index_of(*label);
    utt[j] += 1.0;
    words[j] += static_cast<double>(t.utterance.tokens.size());
    n_words += t.utterance.tokens.size();
  }
  if (tagged.empty()) {
    block.no_utterances = true;
    return block;
  }
  const double denom_words =
      static_cast<double>(word_total ? *word_total : n_words);
  for (std::size_t j = 0; j < 7; ++j) {
    block.values[j] = utt[j] / static_cast<double>(tagged.size());
    block.values[7 + j] = denom_words > 0 ? words[j] / denom_words : 0.0;
  }
  return block;
}

SpacePtr tag_block_space(Scheme scheme, std::string corpus_id) {
  const TagSet& tags = TagSet::for_scheme(scheme);
  auto space = std::make_shared<FeatureSpace>();
  for (const auto& l : tags.labels()) space->names.push_back(l + ":utt");
  for (const auto& l : tags.labels()) space->names.push_back(l + ":words");
  space->provenance = Provenance::kTagCounts;
  space->corpus_id = std::move(corpus_id);
  space->blocks.push_back({to_lower(scheme_name(scheme)), Provenance::kTagCounts,
                           0, 14, false});
  return space;
}

SparseFeatureVector to_sparse(const TagFeatureBlock& block, const SpacePtr& space) {
  if (space->dim() != block.values.size()) {
    throw ValidationError("tag block space must have 14 features");
  }
  SparseFeatureVector v;
  v.space = space;
  for (std::size_t j = 0; j < block.values.size(); ++j) {
    v.indices.push_back(j);
    v.values.push_back(block.values[j]);
  }
  return v;
}

std::vector<std::string> plain_tokens(const std::vector<TaggedUtterance>& tagged) {
  std::vector<std::string> out;
  for (const auto& t : tagged)
    for (const auto& tok : t.utterance.tokens) out.push_back(to_lower(tok.text));
  return out;
}

std::vector<std::string> augment_tokens(const std::vector<TaggedUtterance>& tagged,
                                        Scheme scheme) {
  std::vector<std::string> out;
  for (const auto& t : tagged) {
    const auto& label = scheme == Scheme::kDialogAct ? t.da : t.mc;
    if (!label) throw ValidationError("augment_tokens: untagged utterance");
    TagSet::for_scheme(scheme).index_of(*label);
    for (const auto& tok : t.utterance.tokens)
      out.push_back(to_lower(tok.text) + "|" + *label);
  }
  return out;
}

SpacePtr concat_spaces(const SpacePtr& a, const SpacePtr& b) {
  if (a->corpus_id != b->corpus_id) {
    throw ValidationError("cannot concatenate feature spaces fitted on different "
                          "corpora");
  }
  auto space = std::make_shared<FeatureSpace>();
  space->provenance = Provenance::kConcat;
  space->corpus_id = a->corpus_id;
  space->num_documents = std::max(a->num_documents, b->num_documents);
  space->max_df = a->max_df;
  space->min_df = a->min_df;
  auto append = [&](const FeatureSpace& s) {
    const std::size_t offset = space->names.size();
    std::vector<FeatureBlock> blocks = s.blocks;
    if (blocks.empty()) blocks.push_back({"", s.provenance, 0, s.dim(), true});
    for (auto b : blocks) {
      for (std::size_t j = b.offset; j < b.offset + b.size; ++j) {
        space->names.push_back(b.prefix.empty() ? s.names[j]
                                                : b.prefix + ":" + s.names[j]);
      }
      b.offset += offset;
      space->blocks.push_back(b);
    }
    // df/idf are carried only when both sides are tf-idf-like; otherwise pad.
    for (std::size_t j = 0; j < s.dim(); ++j) {
      space->df.push_back(s.df.empty() ? 0 : s.df[j]);
      space->idf.push_back(s.idf.empty() ? 0.0 : s.idf[j]);
    }
  };
  append(*a);
  append(*b);
  return space;
}

SparseFeatureVector fuse_concat(const SparseFeatureVector& a,
                                const SparseFeatureVector& b,
                                const SpacePtr& fused_space) {
  if (!a.space || !b.space) throw ValidationError("fuse_concat: unfitted vector");
  SpacePtr space = fused_space ? fused_space : concat_spaces(a.space, b.space);
  if (a.space->corpus_id != b.space->corpus_id ||
      space->corpus_id != a.space->corpus_id) {
    throw ValidationError("fuse_concat: vectors come from different corpora");
  }
  if (space->dim() != a.dim() + b.dim()) {
    throw ValidationError("fuse_concat: fused space has the wrong dimension");
  }
  SparseFeatureVector v;
  v.space = space;
  v.indices = a.indices;
  v.values = a.values;
  for (std::size_t i = 0; i < b.indices.size(); ++i) {
    v.indices.push_back(a.dim() + b.indices[i]);
    v.values.push_back(b.values[i]);
  }
  return v;
}

std::vector<double> anova_f_scores(const Eigen::MatrixXd& x,
                                   const std::vector<int>& y) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw ValidationError("anova_f_scores: row/label count mismatch");
  }
  std::size_t n1 = 0;
  for (int v : y) n1 += v != 0;
  const std::size_t n = y.size();
  const std::size_t n0 = n - n1;
  if (n0 == 0 || n1 == 0) {
    throw ValidationError("anova_f_scores: both classes must be present");
  }
  std::vector<double> f(static_cast<std::size_t>(x.cols()), 0.0);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double sum[2] = {0, 0};
    double lo[2] = {std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
    double hi[2] = {-lo[0], -lo[1]};
    for (std::size_t i = 0; i < n; ++i) {
      const int c = y[i] != 0;
      const double v = x(static_cast<Eigen::Index>(i), j);
      sum[c] += v;
      lo[c] = std::min(lo[c], v);
      hi[c] = std::max(hi[c], v);
    }
    const bool constant = std::min(lo[0], lo[1]) == std::max(hi[0], hi[1]);
    if (constant) continue;  // F = 0
    const double m0 = sum[0] / static_cast<double>(n0);
    const double m1 = sum[1] / static_cast<double>(n1);
    const bool flat_within = lo[0] == hi[0] && lo[1] == hi[1];
    if (flat_within) {
      f[static_cast<std::size_t>(j)] = std::numeric_limits<double>::infinity();
      continue;
    }
    double within = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = x(static_cast<Eigen::Index>(i), j) - (y[i] != 0 ? m1 : m0);
      within += d * d;
    }
    const double diff = m1 - m0;
    const double between = diff * diff * static_cast<double>(n0) *
                           static_cast<double>(n1) / static_cast<double>(n);
    f[static_cast<std::size_t>(j)] =
        n > 2 ? between / (within / static_cast<double>(n - 2))
              : std::numeric_limits<double>::infinity();
  }
  return f;
}

std::vector<bool> select_top_k(const std::vector<double>& f_scores,
                               const std::vector<bool>& selectable, std::size_t k) {
  if (f_scores.size() != selectable.size()) {
    throw ValidationError("select_top_k: mask and score sizes differ");
  }
  std::vector<std::size_t> candidates;
  std::vector<bool> keep(f_scores.size(), false);
  for (std::size_t j = 0; j < f_scores.size(); ++j) {
    if (selectable[j]) {
      candidates.push_back(j);
    } else {
      keep[j] = true;
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) {
                     return f_scores[a] > f_scores[b];
                   });
  k = std::min(k, candidates.size());
  for (std::size_t i = 0; i < k; ++i) keep[candidates[i]] = true;
  return keep;
}

Json ScalerStats::to_json() const { return Json{{"mean", mean}, {"std", std}}; }

ScalerStats ScalerStats::from_json(const Json& doc) {
  ScalerStats s;
  s.mean = doc.at("mean").get<std::vector<double>>();
  s.std = doc.at("std").get<std::vector<double>>();
  if (s.mean.size() != s.std.size()) {
    throw ValidationError("scaler mean/std sizes differ");
  }
  return s;
}

ScalerStats fit_scaler(const Eigen::MatrixXd& x_train) {
  if (x_train.rows() == 0) throw ValidationError("fit_scaler: no rows");
  ScalerStats s;
  const auto n = static_cast<double>(x_train.rows());
  s.mean.resize(static_cast<std::size_t>(x_train.cols()));
  s.std.resize(static_cast<std::size_t>(x_train.cols()));
  for (Eigen::Index j = 0; j < x_train.cols(); ++j) {
    const auto col = x_train.col(j);
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    const double mean = col.sum() / n;
    double var = 0.0;
    if (lo != hi) {
      for (Eigen::Index i = 0; i < col.size(); ++i) {
        const double d = col(i) - mean;
        var += d * d;
      }
      var /= n;
    }
    s.mean[static_cast<std::size_t>(j)] = mean;
    s.std[static_cast<std::size_t>(j)] = std::sqrt(var);
  }
  return s;
}

Eigen::MatrixXd apply_scaler(const Eigen::MatrixXd& x, const ScalerStats& stats) {
  if (static_cast<std::size_t>(x.cols()) != stats.mean.size()) {
    throw ValidationError("apply_scaler: dimension mismatch");
  }
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double sd = stats.std[static_cast<std::size_t>(j)];
    if (sd == 0.0) {
      out.col(j).setZero();
    } else {
      out.col(j) =
          (x.col(j).array() - stats.mean[static_cast<std::size_t>(j)]) / sd;
    }
  }
  return out;
}

std::string_view feature_set_name(FeatureSet set) {
  switch (set) {
    case FeatureSet::kTfidf: return "tfidf";
    case FeatureSet::kDa: return "da";
    case FeatureSet::kMc: return "mc";
    case FeatureSet::kTfidfPlusDa: return "tfidf+da";
    case FeatureSet::kTfidfPlusMc: return "tfidf+mc";
    case FeatureSet::kDaTfidf: return "da-tfidf";
    case FeatureSet::kMcTfidf: return "mc-tfidf";
  }
  return "?";
}

FeatureSet parse_feature_set(std::string_view name) {
  for (FeatureSet s : kAllFeatureSets)
    if (feature_set_name(s) == name) return s;
  throw ValidationError("unknown feature set '" + std::string(name) +
                        "' (expected tfidf, da, mc, tfidf+da, tfidf+mc, "
                        "da-tfidf or mc-tfidf)");
}

bool needs_scheme(FeatureSet set, Scheme scheme) {
  switch (set) {
    case FeatureSet::kTfidf: return false;
    case FeatureSet::kDa:
    case FeatureSet::kTfidfPlusDa:
    case FeatureSet::kDaTfidf: return scheme == Scheme::kDialogAct;
    case FeatureSet::kMc:
    case FeatureSet::kTfidfPlusMc:
    case FeatureSet::kMcTfidf: return scheme == Scheme::kMiCode;
  }
  return false;
}

namespace {

std::size_t session_word_count(const Session& s) {
  std::size_t n = 0;
  for (const auto& t : s.turns) n += t.tokens.size();
  return n;
}

Eigen::MatrixXd densify(const std::vector<SparseFeatureVector>& rows,
                        std::size_t dim) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                            static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].indices.size(); ++k)
      x(static_cast<Eigen::Index>(i),
        static_cast<Eigen::Index>(rows[i].indices[k])) = rows[i].values[k];
  return x;
}

}  // namespace

FeatureMatrix featurize(const std::vector<Session>& sessions, FeatureSet set,
                        const FeaturizeOptions& options) {
  if (sessions.empty()) throw ValidationError("featurize: empty corpus");
  FeatureMatrix m;
  for (const auto& s : sessions) m.row_ids.push_back(s.id);
  const std::string corpus_id = corpus_fingerprint(m.row_ids);

  std::vector<std::vector<TaggedUtterance>> therapist;
  therapist.reserve(sessions.size());
  for (const auto& s : sessions) {
    therapist.push_back(therapist_utterances(s));
    if (therapist.back().empty()) {
      m.warnings.push_back("session " + s.id + " has no therapist utterances");
    }
  }

  auto tfidf_rows = [&](bool augmented, Scheme scheme) {
    std::vector<std::vector<std::string>> docs;
    for (const auto& th : therapist)
      docs.push_back(augmented ? augment_tokens(th, scheme) : plain_tokens(th));
    SpacePtr space = fit_tfidf(
        docs, options.max_df, options.min_df,
        augmented ? Provenance::kAugmentedTfidf : Provenance::kTfidf, corpus_id);
    std::vector<SparseFeatureVector> rows;
    for (const auto& d : docs) rows.push_back(transform_tfidf(d, space));
    return rows;
  };
  auto block_rows = [&](Scheme scheme) {
    SpacePtr space = tag_block_space(scheme, corpus_id);
    std::vector<SparseFeatureVector> rows;
    for (std::size_t i = 0; i < sessions.size(); ++i) {
      std::optional<std::size_t> total;
      if (options.word_norm == WordNorm::kSessionWords)
        total = session_word_count(sessions[i]);
      rows.push_back(to_sparse(tag_count_features(therapist[i], scheme, total),
                               space));
    }
    return rows;
  };
  auto concat_rows = [](const std::vector<SparseFeatureVector>& a,
                        const std::vector<SparseFeatureVector>& b) {
    SpacePtr fused = concat_spaces(a.front().space, b.front().space);
    std::vector<SparseFeatureVector> rows;
    for (std::size_t i = 0; i < a.size(); ++i)
      rows.push_back(fuse_concat(a[i], b[i], fused));
    return rows;
  };

  std::vector<SparseFeatureVector> rows;
  switch (set) {
    case FeatureSet::kTfidf:
      rows = tfidf_rows(false, Scheme::kMiCode);
      break;
    case FeatureSet::kDa:
      rows = block_rows(Scheme::kDialogAct);
      break;
    case FeatureSet::kMc:
      rows = block_rows(Scheme::kMiCode);
      break;
    case FeatureSet::kTfidfPlusDa:
      rows = concat_rows(tfidf_rows(false, Scheme::kMiCode),
                         block_rows(Scheme::kDialogAct));
      break;
    case FeatureSet::kTfidfPlusMc:
      rows = concat_rows(tfidf_rows(false, Scheme::kMiCode),
                         block_rows(Scheme::kMiCode));
      break;
    case FeatureSet::kDaTfidf:
      rows = tfidf_rows(true, Scheme::kDialogAct);
      break;
    case FeatureSet::kMcTfidf:
      rows = tfidf_rows(true, Scheme::kMiCode);
      break;
  }
  m.space = rows.front().space;
  m.x = densify(rows, m.space->dim());
  m.feature_set = set;
  return m;
}

std::filesystem::path space_path_for(const std::filesystem::path& matrix_path) {
  return std::filesystem::path(matrix_path.string() + ".space.json");
}

void write_feature_matrix(const std::filesystem::path& path,
                          const FeatureMatrix& m) {
  const auto space_file = space_path_for(path);
  write_json_file(space_file, m.space->to_json());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "# ctrscode sparse matrix\n";
  out << "# format_version " << kFormatVersion << '\n';
  out << "# created_by " << kToolName << ' ' << kToolVersion << '\n';
  out << "# feature_space " << m.space->id() << ' '
      << space_file.filename().string() << '\n';
  if (m.feature_set) out << "# feature_set " << feature_set_name(*m.feature_set) << '\n';
  out << "# shape " << m.x.rows() << ' ' << m.x.cols() << '\n';
  for (std::size_t i = 0; i < m.row_ids.size(); ++i)
    out << "# row " << i << ' ' << m.row_ids[i] << '\n';
  for (Eigen::Index i = 0; i < m.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.x.cols(); ++j) {
      const double v = m.x(i, j);
      if (v != 0.0) out << i << ' ' << j << ' ' << format_double(v) << '\n';
    }
  }
}

FeatureMatrix read_feature_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open matrix " + path.string());
  FeatureMatrix m;
  std::string line, space_id, space_file;
  long rows = -1, cols = -1;
  int line_no = 0;
  bool version_ok = false;
  std::vector<std::tuple<long, long, double>> triplets;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    if (line[0] == '#') {
      std::string hash, key;
      ss >> hash >> key;
      if (key == "format_version") {
        int v = 0;
        ss >> v;
        version_ok = v == kFormatVersion;
      } else if (key == "feature_space") {
        ss >> space_id >> space_file;
      } else if (key == "feature_set") {
        std::string name;
        ss >> name;
        try {
          m.feature_set = parse_feature_set(name);
        } catch (const ValidationError&) {
          throw ParseError("unknown feature set '" + name + "'", line_no);
        }
      } else if (key == "shape") {
        ss >> rows >> cols;
      } else if (key == "row") {
        std::size_t idx = 0;
        std::string id;
        ss >> idx >> id;
        if (idx != m.row_ids.size()) throw ParseError("row map out of order", line_no);
        m.row_ids.push_back(id);
      }
      continue;
    }
    std::string r, c, v;
    ss >> r >> c >> v;
    long ri = 0, ci = 0;
    double val = 0.0;
    auto ok = [](const std::string& s, auto& out) {
      auto res = std::from_chars(s.data(), s.data() + s.size(), out);
      return res.ec == std::errc() && res.ptr == s.data() + s.size();
    };
    if (!ok(r, ri) || !ok(c, ci) || !ok(v, val)) {
      throw ParseError("malformed triplet", line_no);
    }
    if (!std::isfinite(val)) {
      throw NumericalError("non-finite matrix value at line " + std::to_string(line_no));
    }
    triplets.emplace_back(ri, ci, val);
  }
  if (!version_ok) throw ParseError("matrix file lacks format_version 1");
  if (rows < 0 || cols < 0 || static_cast<long>(m.row_ids.size()) != rows) {
    throw ParseError("matrix header shape/row map is inconsistent");
  }
  auto space = std::make_shared<FeatureSpace>(FeatureSpace::from_json(
      read_json_file(path.parent_path() / space_file)));
  if (space->id() != space_id || static_cast<long>(space->dim()) != cols) {
    throw ValidationError("matrix does not match its feature space file");
  }
  m.space = space;
  m.x = Eigen::MatrixXd::Zero(rows, cols);
  for (const auto& [ri, ci, val] : triplets) {
    if (ri < 0 || ri >= rows || ci < 0 || ci >= cols) {
      throw ValidationError("matrix triplet outside the declared shape");
    }
    m.x(ri, ci) = val;
  }
  return m;
}

}  // namespace ctrs
