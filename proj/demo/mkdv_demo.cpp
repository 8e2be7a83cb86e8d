// Builds the MKdV 1-soliton by Darboux dressing, compares it with
// 2 lambda_0 sech(2 xi), then dresses a second time for a 2-soliton.
//
//   mkdv_demo [output-dir]

#include <cmath>
#include <cstdio>
#include <string>

#include "nisakns/io.hpp"
#include "nisakns/soliton.hpp"

using namespace nisakns;

int main(int argc, char** argv) {
    mkdv::SolitonSpec spec;
    spec.t_hi = 0.2;
    spec.second_lambda = -1.5;
    spec.validate();

    const auto one = mkdv::one_soliton(spec);
    std::printf("1-soliton: max |u_darboux - u_closed| = %.3e\n", one.max_difference);
    std::printf("%8s %8s %14s %14s\n", "t", "x", "u", "2 l0 sech 2xi");
    const Grid& g = spec.grid;
    for (std::size_t ti = 0; ti < g.nt(); ++ti)
        for (std::size_t xi = 0; xi < g.nx(); xi += 250)
            std::printf("%8.3f %8.3f %14.10f %14.10f\n", g.t()[ti], g.x(xi), one.darboux.at(ti, xi),
                        one.closed_form.at(ti, xi));

    const auto two = mkdv::two_soliton(spec);
    std::printf("2-soliton: max |p + q| = %.3e, max |Im p| = %.3e, min normalized det H = %.3e\n",
                two.reduction_error, two.imag_part, two.min_normalized_det);
    for (std::size_t ti = 0; ti < g.nt(); ++ti) {
        double peak = 0.0, at = 0.0;
        for (std::size_t xi = 0; xi < g.nx(); ++xi)
            if (std::abs(two.u.at(ti, xi)) > peak) {
                peak = std::abs(two.u.at(ti, xi));
                at = g.x(xi);
            }
        std::printf("t = %.3f: max |u| = %.6f at x = %.3f\n", g.t()[ti], peak, at);
    }

    if (argc > 1) {
        OutputSet out;
        auto cols = scalar_columns("u", one.darboux.u);
        auto closed = scalar_columns("u_closed", one.closed_form.u);
        cols.insert(cols.end(), closed.begin(), closed.end());
        out.add("soliton.csv", field_csv(g, cols));
        out.add("soliton2.csv", field_csv(g, scalar_columns("u", two.u.u)));
        out.write(argv[1]);
        std::printf("wrote %s/soliton.csv and %s/soliton2.csv\n", argv[1], argv[1]);
    }
    return 0;
}
