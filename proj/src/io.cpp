#include "phicp/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace phicp::io {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void append_vec_headers(std::string& h, const std::string& base, std::size_t dim, bool full) {
    if (!full) {
        h += "," + base + "_norm";
        return;
    }
    if (dim == 1) {
        h += "," + base;
        return;
    }
    for (std::size_t i = 0; i < dim; ++i) h += "," + base + std::to_string(i);
}

void append_vec_values(std::string& row, const Vec& v, double norm_value, bool full) {
    if (!full) {
        row += "," + format_g17(norm_value);
        return;
    }
    for (double x : v) row += "," + format_g17(x);
}

std::vector<std::string> monitor_names(const Trace& trace) {
    std::vector<std::string> names;
    for (const TraceRecord& rec : trace.records)
        for (const auto& [name, _] : rec.monitors)
            if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    return names;
}

}  // namespace

std::string trace_csv_string(const Trace& trace) {
    const TraceRecord& ini = trace.initial;
    const bool full = trace.full_iterates;
    const bool has_a_dual = ini.a_dual.has_value();
    const bool has_dist = ini.dist_primal.has_value();
    const std::vector<std::string> mons = monitor_names(trace);

    std::string out = "n";
    append_vec_headers(out, "x", ini.x.size(), full);
    append_vec_headers(out, "dual", ini.dual_u.size(), full);
    out += ",abar";
    if (has_a_dual) out += ",a_dual";
    if (has_dist) out += ",dist_primal,dist_dual";
    for (const std::string& m : mons) out += ",mon:" + m;
    out += "\n";

    auto emit = [&](const TraceRecord& rec) {
        std::string row = std::to_string(rec.n);
        append_vec_values(row, rec.x, rec.x_norm, full);
        append_vec_values(row, rec.dual_u, rec.dual_norm, full);
        row += "," + format_g17(rec.abar);
        if (has_a_dual) row += "," + format_g17(rec.a_dual.value_or(std::nan("")));
        if (has_dist) {
            row += "," + format_g17(rec.dist_primal.value_or(std::nan("")));
            row += "," + format_g17(rec.dist_dual.value_or(std::nan("")));
        }
        for (const std::string& m : mons) {
            double v = std::nan("");
            for (const auto& [name, val] : rec.monitors)
                if (name == m) v = val;
            row += "," + format_g17(v);
        }
        out += row + "\n";
    };

    emit(ini);
    for (const TraceRecord& rec : trace.records) emit(rec);
    return out;
}

void write_trace_csv(const std::string& path, const Trace& trace) {
    write_text_file(path, trace_csv_string(trace));
}

std::string ppa_trace_csv_string(const std::vector<PpaRecord>& trace) {
    std::string out = "n,dual,a_dual,mon:h,mon:u_diff\n";
    for (const PpaRecord& rec : trace) {
        out += std::to_string(rec.n);
        out += "," + format_g17(rec.u.empty() ? std::nan("") : rec.u[0]);
        out += "," + format_g17(rec.a);
        out += "," + format_g17(rec.h);
        out += "," + format_g17(rec.u_diff) + "\n";
    }
    return out;
}

void write_ppa_trace_csv(const std::string& path, const std::vector<PpaRecord>& trace) {
    write_text_file(path, ppa_trace_csv_string(trace));
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("io: cannot open '" + path + "' for writing");
    f << content;
}

void write_pgm(const std::string& path, int width, int height, const Vec& pixels) {
    if (static_cast<std::size_t>(width) * height != pixels.size())
        throw std::invalid_argument("write_pgm: dimension mismatch");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("io: cannot open '" + path + "' for writing");
    f << "P5\n" << width << " " << height << "\n255\n";
    for (double v : pixels) {
        const long g = std::lround((v + 1.0) * 0.5 * 255.0);
        f.put(static_cast<char>(std::clamp(g, 0L, 255L)));
    }
}

void write_flat_csv(const std::string& path, const Vec& values) {
    std::string out;
    for (double v : values) out += format_g17(v) + "\n";
    write_text_file(path, out);
}

}  // namespace phicp::io
