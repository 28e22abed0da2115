#pragma once

#include <string>
#include <vector>

#include "qli/layout.hpp"

namespace qli {

// Validation of Q1-Q4, Gauss-Bonnet, holonomy and Q5 in one place.
struct FullValidation {
  ValidationReport immersion;
  Q5Report q5;
  bool pass() const { return immersion.pass() && q5.pass; }
  std::vector<std::string> failed() const;
};
FullValidation validate_all(const SeamlessParam& p, int budget = -1, const Tolerances& tol = {});

// Pretty-printed JSON documents; byte-identical for identical inputs.
std::string report_json(const SeamlessParam& p, const FullValidation& v);
std::string layout_json(const SeamlessParam& p, const FullValidation& v, const QuadLayout& layout);
std::string curve_json(const QuotientCurve& c);

struct SvgOptions {
  double width = 640;  // pixels
  bool show_faces = true;
  bool show_seams = true;
  bool show_cones = true;
};

std::string export_svg(const SeamlessParam& p, const QuadLayout* layout = nullptr,
                       const std::vector<QuotientCurve>& traces = {}, const SvgOptions& opts = {});

}  // namespace qli
