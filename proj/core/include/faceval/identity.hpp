#pragma once

#include <string>
#include <vector>

namespace faceval {

/// Identity embedding exported by a face-recognition network.
struct Embedding {
  std::string extractor;
  std::vector<double> vector;

  friend bool operator==(const Embedding&, const Embedding&) = default;
};

/// Embeddings of one image from an ensemble of extractors; names unique.
struct EmbeddingBundle {
  std::vector<Embedding> entries;

  const Embedding* find(const std::string& extractor) const;

  friend bool operator==(const EmbeddingBundle&, const EmbeddingBundle&) = default;
};

/// Throws EmptyVector, DuplicateExtractor, NonFinite, SchemaViolation (no entries).
void validate(const EmbeddingBundle& bundle);

/// 1 - cos(a, b), clamped to [0, 2].
/// Throws LengthMismatch, ZeroNorm.
double cosine_distance(const Embedding& a, const Embedding& b);

/// Sum of per-extractor cosine distances, entries matched by name.
/// Throws NameSetMismatch when the extractor sets differ.
double identity_loss(const EmbeddingBundle& gt, const EmbeddingBundle& restored);

/// Angle between embeddings in degrees, [0, 180].
double embedding_degrees(const Embedding& a, const Embedding& b);

/// Arithmetic mean of embedding_degrees over extractors matched by name.
double mean_embedding_degrees(const EmbeddingBundle& a, const EmbeddingBundle& b);

}  // namespace faceval
