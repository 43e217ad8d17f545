#include "faceval/identity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "faceval/error.hpp"

namespace faceval {

namespace {

double cosine_similarity(const Embedding& a, const Embedding& b) {
  if (a.vector.size() != b.vector.size()) {
    throw Error(ErrorCode::LengthMismatch, "embedding lengths differ: " + std::to_string(a.vector.size()) +
                                               " vs " + std::to_string(b.vector.size()));
  }
  if (a.vector.empty()) throw Error(ErrorCode::EmptyVector, "embedding is empty");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.vector.size(); ++i) {
    dot += a.vector[i] * b.vector[i];
    na += a.vector[i] * a.vector[i];
    nb += b.vector[i] * b.vector[i];
  }
  if (!std::isfinite(dot) || !std::isfinite(na) || !std::isfinite(nb)) {
    throw Error(ErrorCode::NonFinite, "embedding contains non-finite values");
  }
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorCode::ZeroNorm, "embedding from '" + (na == 0.0 ? a.extractor : b.extractor) +
                                         "' has zero norm");
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::vector<std::pair<const Embedding*, const Embedding*>> match_by_name(const EmbeddingBundle& a,
                                                                         const EmbeddingBundle& b) {
  std::set<std::string> names_a, names_b;
  for (const auto& e : a.entries) names_a.insert(e.extractor);
  for (const auto& e : b.entries) names_b.insert(e.extractor);
  if (names_a != names_b || names_a.size() != a.entries.size() || names_b.size() != b.entries.size()) {
    throw Error(ErrorCode::NameSetMismatch, "embedding bundles list different extractors");
  }
  std::vector<std::pair<const Embedding*, const Embedding*>> pairs;
  for (const auto& name : names_a) pairs.emplace_back(a.find(name), b.find(name));
  return pairs;
}

}  // namespace

const Embedding* EmbeddingBundle::find(const std::string& extractor) const {
  for (const auto& e : entries) {
    if (e.extractor == extractor) return &e;
  }
  return nullptr;
}

void validate(const EmbeddingBundle& bundle) {
  if (bundle.entries.empty()) throw Error(ErrorCode::SchemaViolation, "embedding bundle is empty");
  std::set<std::string> seen;
  for (const auto& e : bundle.entries) {
    if (!seen.insert(e.extractor).second) {
      throw Error(ErrorCode::DuplicateExtractor, "extractor '" + e.extractor + "' listed twice");
    }
    if (e.vector.empty()) throw Error(ErrorCode::EmptyVector, "extractor '" + e.extractor + "' has an empty vector");
    for (double v : e.vector) {
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "extractor '" + e.extractor + "' has non-finite values");
    }
  }
}

double cosine_distance(const Embedding& a, const Embedding& b) {
  return std::clamp(1.0 - cosine_similarity(a, b), 0.0, 2.0);
}

double identity_loss(const EmbeddingBundle& gt, const EmbeddingBundle& restored) {
  double total = 0.0;
  for (const auto& [x, y] : match_by_name(gt, restored)) total += cosine_distance(*x, *y);
  return total;
}

double embedding_degrees(const Embedding& a, const Embedding& b) {
  return std::acos(cosine_similarity(a, b)) * (180.0 / std::numbers::pi);
}

double mean_embedding_degrees(const EmbeddingBundle& a, const EmbeddingBundle& b) {
  const auto pairs = match_by_name(a, b);
  if (pairs.empty()) throw Error(ErrorCode::SchemaViolation, "embedding bundles are empty");
  double total = 0.0;
  for (const auto& [x, y] : pairs) total += embedding_degrees(*x, *y);
  return total / static_cast<double>(pairs.size());
}

}  // namespace faceval
