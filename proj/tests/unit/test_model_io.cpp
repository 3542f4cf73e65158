#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "demandcast/error.hpp"
#include "demandcast/model_io.hpp"

using namespace demandcast;

TEST_CASE("model files round-trip bit for bit", "[model_io]") {
    SarimaFit f;
    f.spec = SarimaSpec::seasonal(1, 0, 1, 2, 1, 1, 7);
    f.params.phi = {0.1234567890123456789};
    f.params.theta = {-1.0 / 3.0};
    f.params.seasonal_phi = {0.3, -0.2};
    f.params.seasonal_theta = {0.7};
    f.params.sigma2 = 12345.678;
    f.n_obs = 993;
    f.converged = true;
    set_information_criteria(f, -4321.123456789);

    std::stringstream buf;
    write_model(buf, f);
    const auto g = read_model(buf);
    CHECK(g.spec == f.spec);
    CHECK(g.params.phi == f.params.phi);
    CHECK(g.params.theta == f.params.theta);
    CHECK(g.params.seasonal_phi == f.params.seasonal_phi);
    CHECK(g.params.seasonal_theta == f.params.seasonal_theta);
    CHECK(g.params.sigma2 == f.params.sigma2);
    CHECK(g.loglik == f.loglik);
    CHECK(g.aic == f.aic);
    CHECK(g.bic == f.bic);
    CHECK(g.n_obs == f.n_obs);
    CHECK(g.converged);
}

TEST_CASE("model files accept decimal coefficients", "[model_io]") {
    std::istringstream in(
        "demandcast_model=1\norder=1,0,0\nseasonal_order=0,0,0,1\nwith_intercept=1\nintercept=100.5\n"
        "phi=0.5\ntheta=\nseasonal_phi=\nseasonal_theta=\nsigma2=2\nloglik=-10\nn_obs=20\nconverged=1\n");
    const auto f = read_model(in);
    CHECK(f.spec == SarimaSpec::arima(1, 0, 0));
    CHECK(f.params.intercept == 100.5);
    CHECK(f.params.phi == std::vector<double>{0.5});
}

TEST_CASE("malformed model files are input errors", "[model_io]") {
    auto read = [](const std::string& text) {
        std::istringstream in(text);
        return read_model(in);
    };
    CHECK_THROWS_AS(read(""), InputError);
    CHECK_THROWS_AS(read("demandcast_model=2\n"), InputError);
    CHECK_THROWS_AS(read("garbage line\n"), InputError);
    CHECK_THROWS_AS(read("demandcast_model=1\norder=1,0,0\nseasonal_order=0,0,0,1\nwith_intercept=1\nintercept=0\n"
                         "phi=\ntheta=\nseasonal_phi=\nseasonal_theta=\nsigma2=1\nloglik=0\nn_obs=1\nconverged=1\n"),
                    InputError);
    CHECK_THROWS_AS(read_model_file("/nonexistent/model.txt"), InputError);
}
