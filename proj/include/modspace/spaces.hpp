#pragma once

#include <vector>

#include "modspace/metric_graph.hpp"
#include "modspace/point_cloud.hpp"

namespace modspace {

/// Unit-square grid: (n+1)^2 vertices at (i/n, j/n), axis edges of length 1/n,
/// uniform edge measure 1/(2n^2). Total measure (n+1)/n -> 1 as n grows.
MetricGraph grid_square(int n);

/// Sierpinski carpet prefractal S_p at level k: grid at mesh p^-k restricted to
/// the cells surviving k rounds of middle-square removal. Edge measure is the
/// area share of adjacent surviving cells, normalized to total 1.
MetricGraph sierpinski_carpet(int p, int k);

/// One vertical slit: segment {x} x [y_lo, y_hi] of a dyadic square.
struct Slit {
    double x = 0.0;
    double y_lo = 0.0;
    double y_hi = 0.0;
    int generation = 0;  // side of the owning square is 2^-generation
};

struct SlitSpec {
    int level = 0;  // slits of generations 0..level are present
    std::vector<Slit> slits;
};

struct SlitCarpet {
    MetricGraph graph;
    SlitSpec spec;
    double mesh = 0.0;
};

/// All slits of generations 0..k. The generation-g square at position (a,b)
/// carries the slit x = (2a+1) 2^-(g+1), y in [(4b+1) 2^-(g+2), (4b+3) 2^-(g+2)]:
/// centered in x, central half of the square in y.
SlitSpec slit_spec(int k);

/// Slit-carpet prefractal at level k on the grid of mesh 2^-(k+2)/m. Vertices
/// strictly inside a slit are duplicated into left/right copies and the edge
/// structure is cut along the slit; slit tips stay single, so the two sides
/// reconnect around them. Edge measure mesh^2/2 as in grid_square.
SlitCarpet slit_carpet_level(int k, int m);

/// Point cloud of the slit carpet drawn with slits opened into lens-shaped
/// gaps of width proportional to slit length (opening_ratio of the half-zone).
/// Zero-width slits are invisible to Euclidean Hausdorff distance, so splitting
/// tests use this rendering. Basepoint is the square center.
PointCloud slit_carpet_cloud(int k, int m, double opening_ratio = 0.5);

}  // namespace modspace
