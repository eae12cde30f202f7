#pragma once

#include "beliefgraph/errors.hpp"

namespace beliefgraph {

// Score cutoffs shared by the coherence and diagnostics analyses. The
// underlying notions ("high" confidence, "strong" support) are qualitative;
// every report embeds the values it was produced with.
struct Thresholds {
    double tau_high = 0.7;     // conf/cred at or above this counts as high
    double tau_low = 0.3;      // conf/cred at or below this counts as low
    double sigma_strong = 1.0; // minimum incoming support mass for "strong"

    void validate() const {
        if (!(tau_high >= 0.0 && tau_high <= 1.0))
            throw Error(Errc::InvalidParameter, "tau_high must lie in [0,1]");
        if (!(tau_low >= 0.0 && tau_low <= 1.0))
            throw Error(Errc::InvalidParameter, "tau_low must lie in [0,1]");
        if (!(tau_low < tau_high))
            throw Error(Errc::InvalidParameter, "tau_low must be strictly below tau_high");
        if (!(sigma_strong > 0.0))
            throw Error(Errc::InvalidParameter, "sigma_strong must be positive");
    }
};

} // namespace beliefgraph
