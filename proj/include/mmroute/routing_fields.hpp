#pragma once

#include <cstdint>

#include "mmroute/engine.hpp"

namespace mmr {

// Route discovery elements shared by standalone RREQ/RREP frames and the
// routing payloads piggybacked on sector sweep frames.
//
// Byte layouts used for overhead accounting (not a wire codec):
//
//   RREQ element, 44 B:
//     element_id 1 | length 1 | flags 1 | hop_count 1 | ttl 1 | reserved 1 |
//     request_id 4 | destination 6 | dest_seq 4 | origin 6 | origin_seq 4 |
//     route_metric 4 | lifetime 4 | transmitter 6
//
//   RREP element, 40 B:
//     element_id 1 | length 1 | flags 1 | hop_count 1 | reserved 2 |
//     destination 6 | dest_seq 4 | origin 6 | lifetime 4 | responder 6 |
//     route_metric 4 | reserved 4

inline constexpr std::uint32_t kRouteRequestBytes = 44;
inline constexpr std::uint32_t kRouteReplyBytes = 40;

struct RouteRequestFields {
    NodeId origin = 0;
    NodeId destination = 0;
    std::uint32_t origin_seq = 0;
    /// Last destination sequence number known to the origin (0 = unknown).
    std::uint32_t dest_seq = 0;
    std::uint32_t request_id = 0;
    std::uint32_t hop_count = 0;
    std::uint32_t ttl = 0;
    std::uint32_t route_metric = 0;

    bool operator==(const RouteRequestFields&) const = default;
};

struct RouteReplyFields {
    NodeId destination = 0;
    std::uint32_t dest_seq = 0;
    std::uint32_t hop_count_to_dest = 0;
    NodeId responder = 0;
    NodeId origin = 0;

    bool operator==(const RouteReplyFields&) const = default;
};

/// Backpressure status element: src 2 | queue_len 4 | advertised_rate 8 | timestamp 8.
inline constexpr std::uint32_t kHelloBytes = 22;

struct HelloMessage {
    NodeId src = 0;
    std::uint32_t queue_len = 0;
    double advertised_rate = 0.0;
    SimTime timestamp;

    bool operator==(const HelloMessage&) const = default;
};

}  // namespace mmr
