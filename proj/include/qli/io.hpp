#pragma once

#include <string>

#include "qli/immersion.hpp"
#include "qli/synth.hpp"

namespace qli {

std::string write_qlim(const SeamlessParam& p);
SeamlessParam read_qlim(const std::string& text);

std::string write_qlay(const AbstractQuadComplex& c);
AbstractQuadComplex read_qlay(const std::string& text);

// Positions and triangular faces only; polygons are fanned.
TriMesh read_obj(const std::string& text);

// Mesh plus empty UV/seam tables, for inputs to the cut command.
SeamlessParam param_from_mesh(TriMesh mesh);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& data);

// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

}  // namespace qli
