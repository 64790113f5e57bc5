#pragma once

#include "femscript/fespace.hpp"

#include <filesystem>
#include <span>
#include <string>

namespace femscript
{

/// Gnuplot data: one "x y" pair per line. Throws InvalidArgument on a
/// length mismatch and IoError when the file cannot be written.
void export_gnu(std::span<const double> xs, std::span<const double> ys, const std::filesystem::path& path);

/// Matlab .bb: header "2 1 1 <ndof> 2", then one DOF value per line. P1 only.
void export_bb(const FeFunction& u, const std::filesystem::path& path);

/// Mathematica text: per triangle, "x y value" for its three vertices, the
/// first one repeated to close the loop, then a blank line. P1 only.
void export_mathematica_txt(const FeFunction& u, const std::filesystem::path& path);

/// One DOF value per line; pairs with read_dofs.
void export_dof_txt(const std::vector<double>& dofs, const std::filesystem::path& path);
std::vector<double> import_dof_txt(const std::filesystem::path& path, std::size_t expected);

/// Encapsulated PostScript wireframe of the mesh. With a function, each
/// triangle is filled by a 64-step blue-to-red colormap of its mean value.
void write_eps(const Mesh& mesh, const FeFunction* u, const std::filesystem::path& path,
               const std::string& caption = {});

/// Stream form of the writers above, used by the file versions.
void write_gnu(std::ostream& out, std::span<const double> xs, std::span<const double> ys);
void write_bb(std::ostream& out, const FeFunction& u);
void write_mathematica_txt(std::ostream& out, const FeFunction& u);

} // namespace femscript
