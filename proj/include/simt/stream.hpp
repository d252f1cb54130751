#ifndef SIMT_STREAM_HPP
#define SIMT_STREAM_HPP

#include <optional>

#include "simt/common.hpp"

namespace simt {

// A source sentence cut into chunks of `chunk_size` tokens. Every chunk has
// exactly `chunk_size` tokens except the last, which carries the remainder
// (1..chunk_size tokens); no token is dropped or padded.
struct ChunkedSource {
  std::vector<TokenSeq> chunks;
  std::size_t chunk_size = 1;

  std::size_t steps() const { return chunks.size(); }  // T
  std::size_t total_tokens() const;
  // Tokens contained in chunks 1..t (1-based, t <= T).
  std::size_t tokens_through_step(std::size_t t) const;
};

struct StreamState {
  std::size_t cursor = 0;
  bool exhausted = false;  // the terminal signal has been delivered

  bool terminal(const ChunkedSource& cs) const { return cursor == cs.steps(); }
};

// Throws ConfigError for chunk_size < 1, DataError for an empty source.
ChunkedSource segment(const TokenSeq& source, std::size_t chunk_size);

// Emits the next chunk and advances the cursor; returns nullopt once as the
// terminal signal after the last chunk. Advancing past that throws
// UsageError.
std::optional<TokenSeq> advance(StreamState& state, const ChunkedSource& cs);

}  // namespace simt

#endif  // SIMT_STREAM_HPP
