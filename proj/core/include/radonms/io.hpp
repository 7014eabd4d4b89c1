#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "radonms/electrostatics.hpp"
#include "radonms/error.hpp"
#include "radonms/geometry.hpp"
#include "radonms/grid.hpp"
#include "radonms/ms.hpp"
#include "radonms/phantom.hpp"
#include "radonms/regularize.hpp"

namespace radonms {

/// Malformed or unreadable input file.
class ParseError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Writes `content` to a temporary file next to `path`, then renames it.
void atomic_write(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Header `dims=d0,d1[,d2];spacing=...;origin=...`, then one line per row of
/// dims[0] values (axis 0 fastest).
std::string image_to_csv(const Image& f);
Image image_from_csv(const std::string& text);

/// Header `n_offsets=..;offset_spacing=..;xmax=..;directions=x:y[:z]@w,...`,
/// then one line of n_offsets values per direction. A `directions=@file`
/// entry names a geometry JSON file relative to `base_dir`.
std::string sinogram_to_csv(const Sinogram& g);
Sinogram sinogram_from_csv(const std::string& text,
                           const std::filesystem::path& base_dir = {});

/// Binary 8-bit PGM with affine min-max scaling (central slice for 3D).
std::string image_to_pgm(const Image& f);
/// Directions as rows, offsets as columns.
std::string sinogram_to_pgm(const Sinogram& g);

/// JSON list of {"center": [..], "semi_axes": [..], "angle": radians,
/// "value": v}; "angle_deg" is accepted in place of "angle".
PhantomSpec phantom_from_json(const std::string& text);
std::string phantom_to_json(const PhantomSpec& spec, int ndim = 2);

/// {"ndim", "n_offsets", "x_max", "directions": [[..]..], "weights": [..]}.
/// Instead of an explicit list, {"n_angles": k} (2D) or {"n_directions": k}
/// (3D hemisphere) may be given.
ProjectionGeometry geometry_from_json(const std::string& text);
std::string geometry_to_json(const ProjectionGeometry& geo);

/// Labels as an image CSV (0-based labels).
std::string partition_to_csv(const Partition& p);
Partition partition_from_csv(const std::string& text, int m, double delta);
/// Labels spread over 0..255.
std::string partition_to_pgm(const Partition& p);

/// `iter,fidelity,perimeter,total`.
std::string energy_trace_csv(const std::vector<EnergyBreakdown>& trace);

/// `k,sigma` and `gamma,tsvd_norm,tikhonov_norm[,band_limited_norm]` tables.
std::string spectrum_sigma_csv(const SpectrumReport& r);
std::string spectrum_norm_csv(const SpectrumReport& r);

/// {"check", "resolution", "residual", "refinement_trend", "tolerance", "passed"}.
std::string residual_report_json(const ResidualReport& r);

}  // namespace radonms
