#ifndef STWALK_EMBEDDING_IO_HPP
#define STWALK_EMBEDDING_IO_HPP

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"
#include "temporal_graph.hpp"

namespace stwalk {

/// String-keyed vectors as stored on disk.
struct NamedEmbeddings {
    std::size_t dim = 0;
    std::vector<std::string> tokens;
    std::vector<Vector> vectors;

    void add(std::string token, Vector vec) {
        if (vec.size() != dim) {
            throw ValidationError("vector for '" + token + "' has dimension " + std::to_string(vec.size()) + ", expected " + std::to_string(dim));
        }
        tokens.push_back(std::move(token));
        vectors.push_back(std::move(vec));
    }

    std::size_t size() const {
        return tokens.size();
    }

    bool operator==(const NamedEmbeddings&) const = default;
};

namespace detail {

inline void write_double(std::ostream& out, double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    out.write(buf, res.ptr - buf);
}

}

/**
 * Writes "count dim" followed by "token v1 ... vd" lines. Values use the
 * shortest representation that parses back to the identical double.
 */
inline void save_embeddings(std::ostream& out, const NamedEmbeddings& emb) {
    out << emb.size() << ' ' << emb.dim << '\n';
    for (std::size_t i = 0; i < emb.size(); ++i) {
        out << emb.tokens[i];
        for (double x : emb.vectors[i]) {
            out << ' ';
            detail::write_double(out, x);
        }
        out << '\n';
    }
}

inline void save_embeddings(const std::filesystem::path& path, const NamedEmbeddings& emb) {
    auto out = detail::open_output(path);
    save_embeddings(out, emb);
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

inline NamedEmbeddings load_embeddings(std::istream& in, const std::string& source = "<stream>") {
    NamedEmbeddings emb;
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(source + ": missing 'count dim' header");
    }
    std::size_t count = 0;
    {
        std::istringstream head(line);
        if (!(head >> count >> emb.dim) || emb.dim == 0) {
            throw ParseError(source + ":1: malformed 'count dim' header");
        }
    }
    emb.tokens.reserve(count);
    emb.vectors.reserve(count);
    std::size_t lineno = 1;
    while (emb.size() < count && std::getline(in, line)) {
        ++lineno;
        auto fields = detail::split_ws(line);
        if (fields.size() != emb.dim + 1) {
            throw ParseError(source + ":" + std::to_string(lineno) + ": expected a token and " + std::to_string(emb.dim) + " values");
        }
        Vector vec(emb.dim);
        for (std::size_t i = 0; i < emb.dim; ++i) {
            const auto& f = fields[i + 1];
            auto res = std::from_chars(f.data(), f.data() + f.size(), vec[i]);
            if (res.ec != std::errc() || res.ptr != f.data() + f.size() || !std::isfinite(vec[i])) {
                throw ParseError(source + ":" + std::to_string(lineno) + ": malformed value '" + f + "'");
            }
        }
        emb.tokens.push_back(std::move(fields[0]));
        emb.vectors.push_back(std::move(vec));
    }
    if (emb.size() != count) {
        throw ParseError(source + ": header announces " + std::to_string(count) + " vectors, found " + std::to_string(emb.size()));
    }
    return emb;
}

inline NamedEmbeddings load_embeddings(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return load_embeddings(in, path.string());
}

}

#endif
