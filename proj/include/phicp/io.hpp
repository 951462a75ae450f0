#pragma once

#include <string>

#include "phicp/algorithms.hpp"
#include "phicp/tomography.hpp"

namespace phicp::io {

/* File formats.
 *
 * Trace CSV: header n,x...,dual...,abar[,a_dual][,dist_primal,dist_dual][,mon:*].
 * Row 0 is the initial state, then one row per completed iteration. Primal
 * and dual columns expand componentwise for dims <= 64 (x / x0,x1,...) and
 * collapse to x_norm / dual_norm above. Columns a run does not produce are
 * omitted entirely; a value a row does not have (a monitor at n = 0) prints
 * as nan, never as an empty cell. All floats use 17 significant digits so
 * traces round-trip exactly and reruns are byte-identical.
 *
 * PGM: binary P5, maxval 255, value mapping -1 -> 0, +1 -> 255 (linear and
 * clamped in between). Flat CSV: one value per line, row-major.
 */

std::string format_g17(double v);

std::string trace_csv_string(const Trace& trace);
void write_trace_csv(const std::string& path, const Trace& trace);

std::string ppa_trace_csv_string(const std::vector<PpaRecord>& trace);
void write_ppa_trace_csv(const std::string& path, const std::vector<PpaRecord>& trace);

void write_text_file(const std::string& path, const std::string& content);

void write_pgm(const std::string& path, int width, int height, const Vec& pixels);
void write_flat_csv(const std::string& path, const Vec& values);

}  // namespace phicp::io
