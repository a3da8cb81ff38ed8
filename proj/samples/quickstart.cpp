// Classical and quantum subspace alignment on one synthetic pair.

#include <cstdio>

#include "subalign/subalign.hpp"

int main() {
    using namespace subalign;

    SynthSpec spec;
    spec.D = 4;
    spec.n_s = spec.n_t = 16;
    spec.domain_shift.rotation_angle = kPi / 3.0;
    spec.seed = 7;
    const auto [source, target] = synth_shifted_gaussians(spec);

    const Index d = 2;
    std::printf("no adaptation : %.3f\n", Evaluator::accuracy(target, baseline_nn_predict(source, target)));
    std::printf("classical SA  : %.3f\n", Evaluator::accuracy(target, sa_nn_predict(source, target, d)));

    // Quantum track: qPCA bases, inner-product circuits, then swap-test nearest neighbour.
    const SaPipeline sa = subspace_alignment(source, target, d);
    const auto ps = qsa::qpca(sa.xs, d).basis;
    const auto pt = qsa::qpca(sa.xt, d).basis;
    const auto qa = qsa::quantum_alignment(ps.P, pt.P, sa.xs, sa.xt);
    for (const auto &t : qa.trace) {
        std::printf("  stage %-8s p_success %.3e  max deviation %.2e\n", t.stage.c_str(), t.success_probability,
                    t.max_abs_deviation);
    }
    qsa::QnnOptions opt;
    opt.plan = quantum::ShotPlan::sampled(9, 1);
    const auto q = qsa::q_nn_classify(qa.X_hat_a(), source.labels(), qa.X_hat_t(), opt);
    std::printf("quantum SA-NN : %.3f\n", Evaluator::accuracy(target, q.labels));
    return 0;
}
