#ifndef STWALK_COMMON_HPP
#define STWALK_COMMON_HPP

#include <cstdint>
#include <functional>
#include <iostream>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace stwalk {

using NodeId = std::uint32_t;

/// 1-based snapshot index.
using TimeStep = std::int32_t;

using Vector = std::vector<double>;

using Rng = std::mt19937_64;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class WindowError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

/**
 * A (node, time step) vocabulary entry. Tokens at different time steps are
 * distinct even when they share a node.
 */
struct Token {
    NodeId node = 0;
    TimeStep time = 0;

    friend constexpr auto operator<=>(const Token&, const Token&) = default;
};

struct TokenHash {
    std::size_t operator()(const Token& tok) const noexcept {
        return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(tok.node) << 32) ^
                                          static_cast<std::uint32_t>(tok.time));
    }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_tag(std::string_view tag) {
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

template<typename Part_>
std::uint64_t seed_part(const Part_& part) {
    if constexpr (std::is_convertible_v<const Part_&, std::string_view>) {
        return hash_tag(part);
    } else {
        return static_cast<std::uint64_t>(part);
    }
}

}

/**
 * Derives an independent seed from a master seed and any number of integer
 * coordinates (component tag, start token, restart index, ...). The
 * derivation is a pure function, so streams do not depend on scheduling.
 */
template<typename... Parts_>
std::uint64_t derive_seed(std::uint64_t master, const Parts_&... parts) {
    std::uint64_t seed = master;
    ((seed = detail::splitmix64(seed ^ detail::splitmix64(detail::seed_part(parts)))), ...);
    return seed;
}

inline Rng make_rng(std::uint64_t seed) {
    return Rng(seed);
}

/**
 * Process-wide warning sink. Library code reports recoverable conditions
 * (dropped edges, skipped nodes, non-convergence) through here.
 */
class Log {
public:
    using Sink = std::function<void(std::string_view)>;

    static void warn(std::string_view message) {
        auto& s = sink();
        if (s) {
            s(message);
        }
    }

    static void set_sink(Sink next) {
        sink() = std::move(next);
    }

    static void silence() {
        sink() = nullptr;
    }

private:
    static Sink& sink() {
        static Sink instance = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
        return instance;
    }
};

}

#endif
