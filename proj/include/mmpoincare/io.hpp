#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mmpoincare/cloud.hpp"
#include "mmpoincare/graph.hpp"

namespace mmp {

/// Shortest round-trippable decimal form of a double (deterministic across
/// runs of the same build).
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == x) {
        for (int prec = 1; prec < 17; ++prec) {
            char probe[32];
            std::snprintf(probe, sizeof(probe), "%.*g", prec, x);
            std::sscanf(probe, "%lf", &back);
            if (back == x) return probe;
        }
    }
    return buf;
}

namespace detail {

/// Lines of a whitespace-separated text format, comments ('#') and blank
/// lines stripped.
inline std::vector<std::vector<std::string>> tokenized_lines(std::istream& in) {
    std::vector<std::vector<std::string>> lines;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::vector<std::string> tokens;
        std::string tok;
        while (ss >> tok) tokens.push_back(tok);
        if (!tokens.empty()) lines.push_back(std::move(tokens));
    }
    return lines;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Edge-list graph format:
//   vertices N
//   i j            (one line per edge)
//   measure        (optional block)
//   i mu           (one line per vertex)
// '#' starts a comment.
// ---------------------------------------------------------------------------

inline MMGraph read_edge_list(std::istream& in, std::string label = {}) {
    const auto lines = detail::tokenized_lines(in);
    if (lines.empty() || lines[0].size() != 2 || lines[0][0] != "vertices")
        throw std::runtime_error("edge list: expected header 'vertices N'");
    const auto n = static_cast<std::size_t>(std::stoull(lines[0][1]));
    std::vector<std::pair<VertexId, VertexId>> edges;
    std::vector<double> measure;
    bool in_measure = false;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& t = lines[i];
        if (t.size() == 1 && t[0] == "measure") {
            in_measure = true;
            measure.assign(n, -1.0);
            continue;
        }
        if (t.size() != 2)
            throw std::runtime_error("edge list: malformed line (expected two fields)");
        if (!in_measure) {
            edges.push_back({static_cast<VertexId>(std::stoull(t[0])),
                             static_cast<VertexId>(std::stoull(t[1]))});
        } else {
            const auto v = static_cast<std::size_t>(std::stoull(t[0]));
            if (v >= n) throw std::runtime_error("edge list: measure vertex out of range");
            measure[v] = std::stod(t[1]);
        }
    }
    if (in_measure)
        for (double m : measure)
            if (m < 0.0) throw std::runtime_error("edge list: measure block is missing a vertex");
    return MMGraph::from_edges(n, edges, std::move(measure), std::move(label));
}

inline MMGraph read_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file: " + path);
    return read_edge_list(in, path);
}

inline void write_edge_list(std::ostream& out, const MMGraph& g) {
    out << "vertices " << g.vertex_count() << "\n";
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
        for (VertexId w : g.neighbors(static_cast<VertexId>(v)))
            if (w > v) out << v << " " << w << "\n";
    out << "measure\n";
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
        out << v << " " << format_double(g.measure(static_cast<VertexId>(v))) << "\n";
}

// ---------------------------------------------------------------------------
// Point-cloud format: one point per line, whitespace-separated coordinates.
// A leading 'weighted' flag line selects a trailing weight column.
// ---------------------------------------------------------------------------

struct RawPointCloud {
    std::vector<double> coords;
    std::size_t dim = 0;
    std::vector<double> weights; ///< empty when the file is unweighted
};

inline RawPointCloud read_point_cloud(std::istream& in) {
    const auto lines = detail::tokenized_lines(in);
    RawPointCloud raw;
    std::size_t start = 0;
    bool weighted = false;
    if (!lines.empty() && lines[0].size() == 1 && lines[0][0] == "weighted") {
        weighted = true;
        start = 1;
    }
    if (start >= lines.size()) throw std::runtime_error("point cloud: no points");
    const std::size_t fields = lines[start].size();
    if (weighted && fields < 2) throw std::runtime_error("point cloud: weighted line too short");
    raw.dim = weighted ? fields - 1 : fields;
    if (raw.dim == 0) throw std::runtime_error("point cloud: zero-dimensional points");
    for (std::size_t i = start; i < lines.size(); ++i) {
        if (lines[i].size() != fields)
            throw std::runtime_error("point cloud: inconsistent field count at line " +
                                     std::to_string(i + 1));
        for (std::size_t k = 0; k < raw.dim; ++k) raw.coords.push_back(std::stod(lines[i][k]));
        if (weighted) raw.weights.push_back(std::stod(lines[i][raw.dim]));
    }
    return raw;
}

inline RawPointCloud read_point_cloud_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open point cloud file: " + path);
    return read_point_cloud(in);
}

inline void write_point_cloud(std::ostream& out, const PointCloud& cloud, bool with_weights) {
    if (with_weights) out << "weighted\n";
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto p = cloud.point(i);
        for (std::size_t k = 0; k < cloud.dim(); ++k) {
            if (k) out << " ";
            out << format_double(p[k]);
        }
        if (with_weights) out << " " << format_double(cloud.weights()[i]);
        out << "\n";
    }
}

// ---------------------------------------------------------------------------
// Minimal CSV writer (deterministic bodies; no timestamps).
// ---------------------------------------------------------------------------

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> row) {
        if (row.size() != header_.size())
            throw std::invalid_argument("CsvWriter: row width mismatch");
        rows_.push_back(std::move(row));
    }

    std::string str() const {
        std::ostringstream out;
        write(out);
        return out.str();
    }

    void write(std::ostream& out) const {
        join(out, header_);
        for (const auto& row : rows_) join(out, row);
    }

private:
    static void join(std::ostream& out, const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out << ",";
            out << fields[i];
        }
        out << "\n";
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace mmp
