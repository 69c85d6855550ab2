// Realize a fractional ownership target over indivisible goods with both
// schemes and compare the realized values against the exact targets.

#include <iostream>

#include "fairdiv/json_io.hpp"
#include "fairdiv/realize.hpp"

int main() {
  using namespace fairdiv;

  const DiscreteProfile profile(3, {{3, 1, 2, 2, 1, 3}, {1, 3, 2, 2, 3, 1}});
  const FractionMatrix thirds({{Rational(2, 3), Rational(2, 3), Rational(2, 3),
                                Rational(2, 3), Rational(2, 3), Rational(2, 3)},
                               {Rational(1, 3), Rational(1, 3), Rational(1, 3),
                                Rational(1, 3), Rational(1, 3), Rational(1, 3)}});

  std::cout << "targets: " << to_json(extension_value(profile, thirds)).dump() << "\n";
  for (const char* name : {"random", "binned"}) {
    const auto alloc = std::string(name) == "random"
                           ? random_scheme(profile, thirds, 11)
                           : binned_scheme(profile, thirds, 11);
    std::cout << name << " scheme owners: " << to_json(alloc)["owner"].dump()
              << "  values:";
    for (size_t i = 0; i < profile.players(); ++i)
      for (size_t p = 0; p < thirds.parts(); ++p)
        std::cout << " " << owned_value(profile, alloc, i, p);
    std::cout << "\n";
  }
  return 0;
}
