#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pbe/error.hpp"
#include "pbe/geometry.hpp"

namespace pbe {

namespace {

bool parse_double(const std::string &token, double &out) {
  const char *first = token.data();
  const char *last = first + token.size();
  if (first != last && *first == '+')
    ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

} // namespace

ChargeSystem ingest_pqr(std::istream &in, double length_per_angstrom,
                        int dimension) {
  if (dimension != 2 && dimension != 3)
    throw GeometryError("PQR dimension must be 2 or 3");
  ChargeSystem system;
  system.dimension = dimension;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string record;
    if (!(ls >> record) || (record != "ATOM" && record != "HETATM"))
      continue;
    std::vector<std::string> tokens;
    for (std::string t; ls >> t;)
      tokens.push_back(t);
    if (tokens.size() < 5)
      throw ParseError(record + " record has fewer than 5 fields", lineno);
    double v[5];
    for (int k = 0; k < 5; ++k) {
      const std::string &tok = tokens[tokens.size() - 5 + k];
      if (!parse_double(tok, v[k]))
        throw ParseError("malformed numeric field '" + tok + "'", lineno);
    }
    if (v[4] < 0.0)
      throw ParseError("negative radius", lineno);
    Charge c;
    c.position = {v[0] * length_per_angstrom, v[1] * length_per_angstrom,
                  dimension == 3 ? v[2] * length_per_angstrom : 0.0};
    c.valence = v[3];
    c.radius = v[4] * length_per_angstrom;
    system.charges.push_back(c);
  }
  if (system.charges.empty())
    throw ParseError("no ATOM/HETATM records in input", 0);
  return system;
}

ChargeSystem ingest_pqr_file(const std::string &path,
                             double length_per_angstrom, int dimension) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open PQR file " + path, 0);
  return ingest_pqr(in, length_per_angstrom, dimension);
}

} // namespace pbe
