#ifndef AGENTNET_COMMON_HPP
#define AGENTNET_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace agentnet {

// Error codes shared across the library. Each maps to one of the documented
// failure modes of the public operations.
enum class Errc {
    disconnected_graph,
    invalid_edge,
    invalid_ports,
    empty_graph,
    port_out_of_range,
    invalid_lambda,
    duplicate_id,
    invalid_id,
    not_distinct,
    out_of_window,
    protocol_fault,
    timeout_exceeded,
    internal_inconsistency,
    invariant_violation,
    duplicate_weight,
    too_large,
    no_candidate,
    io_error,
    bad_config,
};

inline const char* errc_name(Errc e) {
    switch (e) {
        case Errc::disconnected_graph: return "DisconnectedGraph";
        case Errc::invalid_edge: return "InvalidEdge";
        case Errc::invalid_ports: return "InvalidPorts";
        case Errc::empty_graph: return "EmptyGraph";
        case Errc::port_out_of_range: return "PortOutOfRange";
        case Errc::invalid_lambda: return "InvalidLambda";
        case Errc::duplicate_id: return "DuplicateId";
        case Errc::invalid_id: return "InvalidId";
        case Errc::not_distinct: return "NotDistinct";
        case Errc::out_of_window: return "OutOfWindow";
        case Errc::protocol_fault: return "ProtocolFault";
        case Errc::timeout_exceeded: return "TimeoutExceeded";
        case Errc::internal_inconsistency: return "InternalInconsistency";
        case Errc::invariant_violation: return "InvariantViolation";
        case Errc::duplicate_weight: return "DuplicateWeight";
        case Errc::too_large: return "TooLarge";
        case Errc::no_candidate: return "NoCandidate";
        case Errc::io_error: return "IoError";
        case Errc::bad_config: return "BadConfig";
    }
    return "UnknownError";
}

class SimError : public std::runtime_error {
public:
    SimError(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw SimError(code, what); }

// L = ceil(log2(lambda + 1)): the padded ID bit length. lambda >= 1 required.
inline int bit_length_for_lambda(std::int64_t lambda) {
    if (lambda < 1) fail(Errc::invalid_lambda, "lambda must be >= 1");
    int L = 0;
    std::uint64_t v = static_cast<std::uint64_t>(lambda);
    while (v > 0) {
        ++L;
        v >>= 1;
    }
    return L;
}

// ceil(log2(x)) for x >= 1, with a floor of 1 bit (a 1-valued domain still
// occupies one bit in the memory audit).
inline int ceil_log2(std::int64_t x) {
    int b = 0;
    std::int64_t v = 1;
    while (v < x) {
        v <<= 1;
        ++b;
    }
    return b < 1 ? 1 : b;
}

// Small deterministic RNG used everywhere instead of <random> distributions so
// results are bit-identical across standard libraries. splitmix64 core.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound) by rejection (bound > 0).
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform real in [0, 1) with 53 bits.
    double real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// FNV-1a streaming hash for trace/metrics determinism checks.
class Fnv1a {
public:
    void feed(const void* data, std::size_t len) {
        const unsigned char* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h_ ^= p[i];
            h_ *= 0x100000001b3ULL;
        }
    }
    void feed(const std::string& s) { feed(s.data(), s.size()); }
    void feed_int(std::int64_t v) { feed(&v, sizeof v); }
    std::uint64_t value() const { return h_; }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace agentnet

#endif
