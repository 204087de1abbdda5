#include <doctest.h>

#include "swreg/models.hpp"
#include "swreg/rng.hpp"

using namespace swreg;

static Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

TEST_CASE("classify: argmax with lowest-index tie-break") {
    LinearClassifier g{{v2(1, 0), v2(0, 1)}};
    CHECK(classify(g, v2(2, 1)) == 0);
    CHECK(classify(g, v2(1, 2)) == 1);

    LinearClassifier tie{{v2(1, 1), v2(1, 1)}};
    CHECK(classify(tie, v2(3, -1)) == 0);

    LinearClassifier single{{v2(0, 0)}};
    CHECK(classify(single, v2(5, 5)) == 0);

    CHECK_THROWS_AS(classify(g, Vec::Zero(3)), std::invalid_argument);
}

TEST_CASE("classify is invariant to positive input rescaling") {
    rng::Counter gen(5);
    for (int rep = 0; rep < 100; ++rep) {
        LinearClassifier g;
        for (int k = 0; k < 3; ++k) g.W.push_back(v2(gen.uniform(-1, 1), gen.uniform(-1, 1)));
        Vec x = v2(gen.uniform(-1, 1), gen.uniform(-1, 1));
        double s = gen.uniform(0.1, 10.0);
        CHECK(classify(g, x) == classify(g, Vec(s * x)));
    }
}

TEST_CASE("predict_pws clips and routes through the classifier") {
    PwsModel m;
    m.classifier = LinearClassifier{{v2(1, 0), v2(0, 1)}};
    m.components = {ComponentFunction::linear(v2(0.1, 0.1)),
                    ComponentFunction::linear(v2(1.0, 1.0))};
    m.M = 0.5;
    CHECK(predict_pws(m, v2(2, 1)) == doctest::Approx(0.3));
    CHECK(predict_pws(m, v2(1, 2)) == doctest::Approx(0.5)); // clipped from 3.0

    PwsModel single;
    single.classifier = LinearClassifier{{v2(0, 0)}};
    single.components = {ComponentFunction::linear(v2(0.9, 0))};
    CHECK(predict_pws(single, v2(1, 0)) == doctest::Approx(clip(0.9, 0.5)));
}

TEST_CASE("predict_switching clips coordinatewise") {
    SwitchingModel m;
    m.components = {ComponentFunction::linear(Vec::Constant(1, 0.4)),
                    ComponentFunction::linear(Vec::Constant(1, -0.4))};
    auto out = predict_switching(m, Vec::Constant(1, 1.0));
    CHECK(out[0] == doctest::Approx(0.4));
    CHECK(out[1] == doctest::Approx(-0.4));

    SwitchingModel zero;
    zero.components = {ComponentFunction::linear(Vec::Zero(1))};
    CHECK(predict_switching(zero, Vec::Constant(1, 1.0))[0] == doctest::Approx(0.0));

    SwitchingModel big;
    big.components = {ComponentFunction::linear(Vec::Constant(1, 2.0))};
    CHECK(predict_switching(big, Vec::Constant(1, 1.0))[0] == doctest::Approx(0.5));
}

TEST_CASE("pws prediction stays within [-M, M]") {
    rng::Counter gen(7);
    for (int rep = 0; rep < 200; ++rep) {
        PwsModel m;
        for (int k = 0; k < 2; ++k) {
            m.classifier.W.push_back(v2(gen.uniform(-1, 1), gen.uniform(-1, 1)));
            m.components.push_back(
                ComponentFunction::linear(v2(gen.uniform(-2, 2), gen.uniform(-2, 2))));
        }
        Vec x = v2(gen.uniform(-3, 3), gen.uniform(-3, 3));
        double y = predict_pws(m, x);
        CHECK(y >= -0.5);
        CHECK(y <= 0.5);
    }
}

TEST_CASE("switching loss lower-bounds pws loss for shared components") {
    rng::Counter gen(9);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<ComponentFunction> comps;
        PwsModel pws;
        SwitchingModel sw;
        for (int k = 0; k < 3; ++k) {
            auto c = ComponentFunction::linear(v2(gen.uniform(-1, 1), gen.uniform(-1, 1)));
            pws.components.push_back(c);
            sw.components.push_back(c);
            pws.classifier.W.push_back(v2(gen.uniform(-1, 1), gen.uniform(-1, 1)));
        }
        Vec x = v2(gen.uniform(-2, 2), gen.uniform(-2, 2));
        double y = gen.uniform(-0.5, 0.5);
        double p = gen.uniform(1.0, 3.0);
        auto sv = predict_switching(sw, x);
        double sw_loss = std::numeric_limits<double>::infinity();
        for (double t : sv) sw_loss = std::min(sw_loss, std::pow(std::abs(y - t), p));
        double pws_loss = std::pow(std::abs(y - predict_pws(pws, x)), p);
        CHECK(sw_loss <= pws_loss + 1e-15);
    }
}

TEST_CASE("rkhs norm from the Gram quadratic form") {
    Kernel lin = Kernel::linear();

    auto one = ComponentFunction::kernel_expansion({Vec::Constant(1, 1.0)},
                                                   Vec::Constant(1, 1.0), lin);
    CHECK(rkhs_norm(one) == doctest::Approx(1.0)); // K(x,x) = 1

    auto zero = ComponentFunction::kernel_expansion({Vec::Constant(1, 1.0)},
                                                    Vec::Constant(1, 0.0), lin);
    CHECK(rkhs_norm(zero) == doctest::Approx(0.0));

    // Orthogonal support points, alpha = (1,1), Gram = identity.
    auto two = ComponentFunction::kernel_expansion({v2(1, 0), v2(0, 1)},
                                                   Vec::Constant(2, 1.0), lin);
    CHECK(rkhs_norm(two) == doctest::Approx(std::sqrt(2.0)));

    CHECK_THROWS_AS(rkhs_norm(ComponentFunction::linear(v2(1, 0))), std::invalid_argument);
}

TEST_CASE("gaussian kernel gram is PSD on random points") {
    rng::Counter gen(13);
    Kernel k = Kernel::gaussian(0.7);
    std::vector<Vec> pts;
    for (int i = 0; i < 8; ++i) pts.push_back(v2(gen.uniform(-1, 1), gen.uniform(-1, 1)));
    Eigen::MatrixXd G = gram_matrix(k, pts);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
}

TEST_CASE("model JSON round trip") {
    rng::Counter gen(21);

    SwitchingModel sw;
    sw.components = {ComponentFunction::linear(v2(0.25, -0.5)),
                     ComponentFunction::kernel_expansion({v2(0.1, 0.2), v2(-0.3, 0.4)},
                                                         (Vec(2) << 0.5, -0.25).finished(),
                                                         Kernel::gaussian(0.9))};
    json j = to_json(sw);
    SwitchingModel back = switching_from_json(j);
    CHECK(to_json(back) == j);
    for (int rep = 0; rep < 20; ++rep) {
        Vec x = v2(gen.uniform(-1, 1), gen.uniform(-1, 1));
        auto a = predict_switching(sw, x);
        auto b = predict_switching(back, x);
        for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
    }

    PwsModel pm;
    pm.classifier = LinearClassifier{{v2(1, 0), v2(0, 1)}};
    pm.components = {ComponentFunction::linear(v2(0.1, 0.1)),
                     ComponentFunction::linear(v2(-0.1, 0.2))};
    json pj = to_json(pm);
    PwsModel pback = pws_from_json(pj);
    CHECK(to_json(pback) == pj);

    CHECK_THROWS_AS(switching_from_json(pj), std::invalid_argument);
}
