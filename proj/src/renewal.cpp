#include "pyroscale/renewal.hpp"

#include <algorithm>

namespace pyroscale {

std::vector<double> stream_events(const law_spec& law, counter_rng rng,
                                  double horizon) {
    std::vector<double> out;
    renewal_stream s(law, rng);
    for (double t = s.next(); t <= horizon; t = s.next()) out.push_back(t);
    return out;
}

std::pair<std::vector<double>, std::vector<double>>
stream_two_sided(const law_spec& law, counter_rng rng, double horizon) {
    two_sided_stream s(law, rng);
    std::vector<double> neg, pos;
    for (double t = s.next_left(); t >= -horizon; t = s.next_left())
        neg.push_back(t);
    std::reverse(neg.begin(), neg.end());
    for (double t = s.next_right(); t <= horizon; t = s.next_right())
        pos.push_back(t);
    return {std::move(neg), std::move(pos)};
}

} // namespace pyroscale
