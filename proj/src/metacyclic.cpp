#include "tloc/metacyclic.hpp"

namespace tloc {

std::vector<SubfieldInfo> subfield_lattice(const MetacyclicGroup& G, const GammaElem& tau) {
    if (tau == G.id() || G.mul(tau, tau) != G.id())
        throw TauNotInvolution("subfield_lattice: tau must have order two");
    std::vector<SubfieldInfo> out;
    out.push_back(make_subfield(G, "K", {}));
    out.push_back(make_subfield(G, "K+", {tau}));
    auto H = G.involutions();
    if (H.size() == 4) {
        GammaElem dp = G.delta(G.e() / 2);
        GammaElem tp = G.mul(dp, tau);
        out.push_back(make_subfield(G, "Kdelta'", {dp}));
        out.push_back(make_subfield(G, "Ktau'", {tp}));
        out.push_back(make_subfield(G, "E", {tau, dp}));
        out.push_back(make_subfield(G, "K0", {G.delta(1)}));
        out.push_back(make_subfield(G, "E0", {tau, dp, G.delta(1)}));
    } else {
        out.push_back(make_subfield(G, "K0", {G.delta(1)}));
    }
    out.push_back(make_subfield(G, "F", {G.delta(1), G.rho(1)}));
    return out;
}

} // namespace tloc
