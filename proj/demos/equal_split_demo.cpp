// Two players with different tastes: build the exact equal split, then run
// both randomized mechanisms and print who got what.

#include <iostream>
#include <vector>

#include "fairdiv/continuous.hpp"
#include "fairdiv/json_io.hpp"

int main() {
  using namespace fairdiv;

  const StepMeasure plain = StepMeasure::uniform();
  const StepMeasure frosting_lover({Rational(0), Rational(3, 4), Rational(1)},
                                   {Rational(1, 3), Rational(3)});
  const std::vector<StepMeasure> players{plain, frosting_lover};

  const Partition split = equal_partition(players);
  std::cout << "equal split:\n";
  for (size_t j = 0; j < split.size(); ++j)
    std::cout << "  part " << j + 1 << " = " << to_json(split.part(j)).dump() << "\n";

  const auto fair = mechanism1(players, 2024);
  std::cout << "mechanism 1 values:";
  for (size_t i = 0; i < players.size(); ++i)
    std::cout << " " << format_rational(measure_of(players[i], fair.pieces[i]));
  std::cout << "\n";

  for (uint64_t seed = 0; seed < 50; ++seed) {
    const auto super = mechanism2(players, QSamplerConfig{Rational(1, 2), seed});
    if (!super.superfair_accepted) continue;
    std::cout << "mechanism 2 accepted a super-fair draw at seed " << seed << ":";
    for (size_t i = 0; i < players.size(); ++i)
      std::cout << " " << format_rational(measure_of(players[i], super.pieces[i]));
    std::cout << "\n";
    break;
  }
  return 0;
}
