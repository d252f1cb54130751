#include "simt/stream.hpp"

#include <fmt/core.h>

namespace simt {

std::size_t ChunkedSource::total_tokens() const {
  std::size_t n = 0;
  for (const auto& c : chunks) n += c.size();
  return n;
}

std::size_t ChunkedSource::tokens_through_step(std::size_t t) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < t && i < chunks.size(); ++i)
    n += chunks[i].size();
  return n;
}

ChunkedSource segment(const TokenSeq& source, std::size_t chunk_size) {
  if (chunk_size < 1)
    throw ConfigError(fmt::format("segment: chunk size {} < 1", chunk_size));
  if (source.empty()) throw DataError("segment: empty source sentence");

  ChunkedSource cs;
  cs.chunk_size = chunk_size;
  for (std::size_t start = 0; start < source.size(); start += chunk_size) {
    const std::size_t end = std::min(start + chunk_size, source.size());
    cs.chunks.emplace_back(source.begin() + static_cast<long>(start),
                           source.begin() + static_cast<long>(end));
  }
  return cs;
}

std::optional<TokenSeq> advance(StreamState& state, const ChunkedSource& cs) {
  if (state.exhausted)
    throw UsageError("advance: stream already past its terminal state");
  if (state.cursor == cs.steps()) {
    state.exhausted = true;
    return std::nullopt;
  }
  return cs.chunks[state.cursor++];
}

}  // namespace simt
