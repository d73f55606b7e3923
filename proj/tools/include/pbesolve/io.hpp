#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pbe/mesh.hpp"
#include "pbe/model.hpp"
#include "pbe/solver.hpp"

namespace pbesolve {

using NamedField = std::pair<std::string, const std::vector<double> *>;

/// VTK legacy ASCII UNSTRUCTURED_GRID with one POINT_DATA scalar per field;
/// region tags go to CELL_DATA when `with_regions` is set.
void write_vtk(std::ostream &out, const pbe::Mesh &mesh, const std::vector<NamedField> &fields,
               bool with_regions = false);
void write_vtk_file(const std::string &path, const pbe::Mesh &mesh,
                    const std::vector<NamedField> &fields, bool with_regions = false);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Header row, then rows with `%.17g` numbers; NaN is written as `nan`.
void write_csv(std::ostream &out, const Table &table);
void write_csv_file(const std::string &path, const Table &table);
Table read_csv(std::istream &in);

/// JSON-lines: one summary record, then one record per Newton iteration.
/// Wall time is left out so repeated runs produce identical bytes.
std::string report_jsonl(const pbe::SolveReport &report, const pbe::PBEProblem &problem);

void write_text_file(const std::string &path, const std::string &text);

} // namespace pbesolve
