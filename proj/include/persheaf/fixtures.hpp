#pragma once
// Built-in stratified posets used by tests and the generator.

#include "persheaf/poset.hpp"

namespace persheaf {

// Single cell, single pdim-0 stratum.
PosetPtr make_point();
// Four-cell circle (two vertices, two edges), one stratum, not geometric.
PosetPtr make_circle();
// Cone over the circle: cone point stratum plus a punctured-disk stratum.
PosetPtr make_cone();
// Suspension of the circle: two cone points, one open stratum.
PosetPtr make_suspension();
// Two disks glued at one point; the branches are separate pdim-1 strata.
PosetPtr make_node();
// Cone over the join of two circles: models the plane stratified by a line
// and the origin (strata of pdim 0, 1, 2; 49 cells).
PosetPtr make_plane_line();

}  // namespace persheaf
