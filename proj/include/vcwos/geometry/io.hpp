// SPDX-License-Identifier: Apache-2.0
#pragma once

// Readers for the two discrete boundary formats:
//   OBJ       "v x y z" and "f a b c" records (triangles only, 1-based or negative indices)
//   POLYLINE  one or more blocks of "POLYLINE n" followed by n "x y" rows;
//             an open block is closed back to its first point.

#include "vcwos/geometry/mesh.hpp"
#include "vcwos/types.hpp"

#include <fstream>
#include <istream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace vcwos::geometry_io {

namespace detail {

inline int resolve_obj_index(const std::string& token, std::size_t vertex_count, int line) {
    const std::string head = token.substr(0, token.find('/'));
    int index = 0;
    try {
        index = std::stoi(head);
    } catch (const std::exception&) {
        throw ConfigError("OBJ line " + std::to_string(line) + ": bad face index '" + token + "'");
    }
    const int resolved = index > 0 ? index - 1 : static_cast<int>(vertex_count) + index;
    if (index == 0 || resolved < 0 || resolved >= static_cast<int>(vertex_count)) {
        throw ConfigError("OBJ line " + std::to_string(line) + ": face index out of range");
    }
    return resolved;
}

inline std::ifstream open(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open '" + path + "'");
    }
    return in;
}

}  // namespace detail

inline std::shared_ptr<const TriangleMesh> read_obj(std::istream& in) {
    std::vector<Vec<3>> vertices;
    std::vector<TriangleMesh::Element> faces;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream row(line);
        std::string tag;
        if (!(row >> tag) || tag[0] == '#') {
            continue;
        }
        if (tag == "v") {
            Vec<3> p;
            if (!(row >> p[0] >> p[1] >> p[2])) {
                throw ConfigError("OBJ line " + std::to_string(line_no) + ": malformed vertex");
            }
            vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<std::string> tokens;
            std::string token;
            while (row >> token) {
                tokens.push_back(token);
            }
            if (tokens.size() != 3) {
                throw ConfigError("OBJ line " + std::to_string(line_no) + ": only triangular faces are supported");
            }
            TriangleMesh::Element face;
            for (std::size_t k = 0; k < 3; ++k) {
                face[k] = detail::resolve_obj_index(tokens[k], vertices.size(), line_no);
            }
            faces.push_back(face);
        }
    }
    if (faces.empty()) {
        throw ConfigError("OBJ: no faces");
    }
    return std::make_shared<const TriangleMesh>(std::move(vertices), std::move(faces));
}

inline std::shared_ptr<const Polyline> read_polyline(std::istream& in) {
    std::vector<Vec<2>> vertices;
    std::vector<Polyline::Element> segments;
    std::string tag;
    while (in >> tag) {
        if (tag != "POLYLINE") {
            throw ConfigError("POLYLINE: expected 'POLYLINE n', found '" + tag + "'");
        }
        long n = 0;
        if (!(in >> n) || n < 2) {
            throw ConfigError("POLYLINE: block needs at least two points");
        }
        const int first = static_cast<int>(vertices.size());
        for (long i = 0; i < n; ++i) {
            Vec<2> p;
            if (!(in >> p[0] >> p[1])) {
                throw ConfigError("POLYLINE: expected " + std::to_string(n) + " rows");
            }
            vertices.push_back(p);
        }
        int last = static_cast<int>(vertices.size()) - 1;
        if (vertices[static_cast<std::size_t>(last)] == vertices[static_cast<std::size_t>(first)]) {
            vertices.pop_back();
            --last;
        }
        for (int i = first; i < last; ++i) {
            segments.push_back({i, i + 1});
        }
        segments.push_back({last, first});
    }
    if (segments.empty()) {
        throw ConfigError("POLYLINE: no blocks");
    }
    return std::make_shared<const Polyline>(std::move(vertices), std::move(segments));
}

inline std::shared_ptr<const TriangleMesh> load_obj(const std::string& path) {
    auto in = detail::open(path);
    return read_obj(in);
}

inline std::shared_ptr<const Polyline> load_polyline(const std::string& path) {
    auto in = detail::open(path);
    return read_polyline(in);
}

}  // namespace vcwos::geometry_io
