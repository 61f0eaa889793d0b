#include "wealthlab/population.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "wealthlab/io.hpp"

namespace wealthlab {

void write_snapshot_csv(std::ostream& out, const Population& pop) {
  out << "balance\n";
  for (double b : pop.balances()) out << format_real(b, 17) << '\n';
}

void write_snapshot_csv(std::ostream& out, const CentPopulation& pop) {
  out << "balance\n";
  for (Cents b : pop.balances()) out << b << '\n';
}

Population read_snapshot_csv(std::istream& in) {
  auto values = read_column(in, "balance");
  require(!values.empty(), ErrorCode::EmptyInput, "snapshot has no rows");
  double floor = 0.0;
  for (double v : values) floor = std::min(floor, v);
  return Population(std::move(values), -floor);
}

}  // namespace wealthlab
