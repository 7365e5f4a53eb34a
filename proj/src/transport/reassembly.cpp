#include "pubbench/transport/reassembly.hpp"

#include <string>

namespace pubbench::transport {

WirePacket encode_nack(const NackRecord& nack) {
  if (nack.missing.empty() || nack.missing.size() > 65535) {
    throw WireError("NACK bitmap must cover 1..65535 fragments");
  }
  WirePacket packet;
  packet.header.type = PacketType::kNack;
  packet.header.topic_id = nack.topic_id;
  packet.header.publisher_id = nack.publisher_id;
  packet.header.seq = nack.seq;
  packet.header.frag_index = 0;
  packet.header.frag_count = static_cast<std::uint16_t>(nack.missing.size());
  packet.payload.assign((nack.missing.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < nack.missing.size(); ++i) {
    if (nack.missing[i]) packet.payload[i / 8] |= static_cast<std::uint8_t>(1U << (i % 8));
  }
  packet.header.payload_len = static_cast<std::uint32_t>(packet.payload.size());
  return packet;
}

NackRecord decode_nack(const PacketHeader& header, std::span<const std::uint8_t> payload) {
  if (header.type != PacketType::kNack) throw WireError("not a NACK packet");
  if (payload.size() != (header.frag_count + 7U) / 8U) throw WireError("NACK bitmap length mismatch");
  NackRecord nack{header.topic_id, header.publisher_id, header.seq, std::vector<bool>(header.frag_count)};
  for (std::size_t i = 0; i < header.frag_count; ++i) nack.missing[i] = ((payload[i / 8] >> (i % 8)) & 1U) != 0;
  return nack;
}

FeedResult ReassemblyBuffer::feed(const PacketHeader& header, SharedSlice payload, std::int64_t now_ns) {
  if (header.type != PacketType::kData) throw ReassemblyError("only DATA packets can be reassembled");
  if (header.frag_count == 0 || header.frag_index >= header.frag_count) {
    throw ReassemblyError("fragment index out of range");
  }
  const MessageKey key{header.topic_id, header.publisher_id, header.seq};
  if (completed_.contains(key) || abandoned_.contains(key)) return {FeedStatus::kDuplicate, std::nullopt};

  auto [it, inserted] = partial_.try_emplace(key);
  Partial& p = it->second;
  if (inserted) {
    p.frag_count = header.frag_count;
    p.fragments.resize(header.frag_count);
    p.have.assign(header.frag_count, false);
    p.publish_ts_ns = header.publish_ts_ns;
    p.first_arrival_ns = now_ns;
  } else if (p.frag_count != header.frag_count) {
    throw ReassemblyError("frag_count " + std::to_string(header.frag_count) + " disagrees with " +
                          std::to_string(p.frag_count) + " for topic " + std::to_string(key.topic_id) +
                          " publisher " + std::to_string(key.publisher_id) + " seq " + std::to_string(key.seq));
  }
  if (p.have[header.frag_index]) return {FeedStatus::kDuplicate, std::nullopt};

  p.have[header.frag_index] = true;
  p.last_arrival_ns = now_ns;
  p.fragments[header.frag_index] = std::move(payload);
  if (++p.received < p.frag_count) return {FeedStatus::kPending, std::nullopt};

  CompletedMessage done{key, p.publish_ts_ns, now_ns, FragmentedPayload(std::move(p.fragments))};
  partial_.erase(it);
  completed_.insert(key);
  return {FeedStatus::kComplete, std::move(done)};
}

FeedResult ReassemblyBuffer::feed(const WirePacket& packet, std::int64_t now_ns) {
  auto owner = std::make_shared<const std::vector<std::uint8_t>>(packet.payload);
  const auto len = owner->size();
  return feed(packet.header, SharedSlice{std::move(owner), 0, len}, now_ns);
}

RepairOutcome ReassemblyBuffer::repair_round(std::int64_t now_ns) {
  RepairOutcome out;
  for (auto it = partial_.begin(); it != partial_.end();) {
    auto& [key, p] = *it;
    if (now_ns - p.repair_base() < policy_.interval_ns) {
      ++it;
      continue;
    }
    if (p.rounds >= policy_.max_rounds) {
      out.abandoned.push_back(key);
      abandoned_.insert(key);
      it = partial_.erase(it);
      continue;
    }
    ++p.rounds;
    p.last_nack_ns = now_ns;
    NackRecord nack{key.topic_id, key.publisher_id, key.seq, std::vector<bool>(p.frag_count)};
    for (std::size_t i = 0; i < p.frag_count; ++i) nack.missing[i] = !p.have[i];
    out.nacks.push_back(std::move(nack));
    ++it;
  }
  return out;
}

std::vector<MessageKey> ReassemblyBuffer::expire(std::int64_t now_ns, std::int64_t max_age_ns) {
  std::vector<MessageKey> out;
  for (auto it = partial_.begin(); it != partial_.end();) {
    if (now_ns - it->second.first_arrival_ns >= max_age_ns) {
      out.push_back(it->first);
      abandoned_.insert(it->first);
      it = partial_.erase(it);
    } else {
      ++it;
    }
  }
  return out;
}

std::optional<std::int64_t> ReassemblyBuffer::next_repair_ns() const {
  std::optional<std::int64_t> best;
  for (const auto& [key, p] : partial_) {
    const auto due = p.repair_base() + policy_.interval_ns;
    if (!best || due < *best) best = due;
  }
  return best;
}

}  // namespace pubbench::transport
