#include "ubbs1/specfun.hpp"

#include <Eigen/Eigenvalues>

#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

namespace ubbs1::specfun {

namespace {

// Chebyshev coefficients from SLATEC FNLIB (W. Fullerton, LANL; public domain).
constexpr double kBi0cs[] = {
    -0.07660547252839144951081894976243285, 1.927337953993808269952408750881196,
    0.2282644586920301338937029292330415,   0.01304891466707290428079334210691888,
    4.344270900816487451378682681026107e-4, 9.422657686001934663923171744118766e-6,
    1.434006289510691079962091878179957e-7, 1.613849069661749069915419719994611e-9,
    1.396650044535669699495092708142522e-11, 9.579451725505445344627523171893333e-14,
    5.333981859862502131015107744e-16,      2.458716088437470774696785919999999e-18};
constexpr double kBi1cs[] = {
    -0.0019717132610998597316138503218149, 0.40734887667546480608155393652014,
    0.034838994299959455866245037783787,   0.0015453945563001236038598401058489,
    4.188852109837778412945883200412e-5,   7.6490267648362114741959703966069e-7,
    1.0042493924741178689179808037238e-8,  9.9322077919238106481371298054863e-11,
    7.6638017918447637275200171681349e-13, 4.741418923816739498038809194816e-15,
    2.4041144040745181799863172032e-17,    1.0171505007093713649121100799999e-19};
constexpr double kBk0cs[] = {
    -0.0353273932339027687201140060063153, 0.344289899924628486886344927529213,
    0.0359799365153615016265721303687231,  0.00126461541144692592338479508673447,
    2.28621210311945178608269830297585e-5, 2.53479107902614945730790013428354e-7,
    1.90451637722020885897214059381366e-9, 1.03496952576336245851008317853089e-11,
    4.25981614279108257652445327170133e-14, 1.3744654358807508969423832544e-16,
    3.57089652850837359099688597333333e-19, 7.63164366011643737667498666666666e-22};
constexpr double kBk1cs[] = {
    0.025300227338947770532531120868533,     -0.35315596077654487566723831691801,
    -0.12261118082265714823479067930042,     -0.0069757238596398643501812920296083,
    -1.7302889575130520630176507368979e-4,   -2.4334061415659682349600735030164e-6,
    -2.2133876307347258558315252545126e-8,   -1.4114883926335277610958330212608e-10,
    -6.6669016941993290060853751264373e-13,  -2.4274498505193659339263196864853e-15,
    -7.023863479386287597178379712e-18,      -1.6543275155100994675491029333333e-20};
constexpr double kAk0cs[] = {
    -0.07643947903327941424082978270088,    -0.02235652605699819052023095550791,
    7.734181154693858235300618174047e-4,    -4.281006688886099464452146435416e-5,
    3.08170017386297474365001482666e-6,     -2.639367222009664974067448892723e-7,
    2.563713036403469206294088265742e-8,    -2.742705549900201263857211915244e-9,
    3.169429658097499592080832873403e-10,   -3.902353286962184141601065717962e-11,
    5.068040698188575402050092127286e-12,   -6.889574741007870679541713557984e-13,
    9.744978497825917691388201336831e-14,   -1.427332841884548505389855340122e-14,
    2.156412571021463039558062976527e-15,   -3.34965425514956277218878205853e-16,
    5.335260216952911692145280392601e-17,   -8.693669980890753807639622378837e-18,
    1.446404347862212227887763442346e-18,   -2.452889825500129682404678751573e-19};
constexpr double kAk02cs[] = {
    -0.01201869826307592239839346212452,    -0.009174852691025695310652561075713,
    1.444550931775005821048843878057e-4,    -4.013614175435709728671021077879e-6,
    1.567831810852310672590348990333e-7,    -7.77011043852173771031579975446e-9,
    4.611182576179717882533130529586e-10,   -3.158592997860565770526665803309e-11,
    2.435018039365041127835887814329e-12,   -2.074331387398347897709853373506e-13,
    1.925787280589917084742736504693e-14,   -1.927554805838956103600347182218e-15,
    2.062198029197818278285237869644e-16,   -2.341685117579242402603640195071e-17,
    2.805902810643042246815178828458e-18,   -3.530507631161807945815482463573e-19};
constexpr double kAk1cs[] = {
    0.27443134069738829695257666227266,      0.07571989953199367817089237814929,
    -0.0014410515564754061229853116175625,   6.6501169551257479394251385477036e-5,
    -4.3699847095201407660580845089167e-6,   3.5402774997630526799417139008534e-7,
    -3.3111637792932920208982688245704e-8,   3.4459775819010534532311499770992e-9,
    -3.8989323474754271048981937492758e-10,  4.7208197504658356400947449339005e-11,
    -6.047835662875356234537359156289e-12,   8.1284948748658747888193837985663e-13,
    -1.1386945747147891428923915951042e-13,  1.654035840846228232597294820509e-14,
    -2.4809025677068848221516010440533e-15,  3.8292378907024096948429227299157e-16,
    -6.0647341040012418187768210377386e-17,  9.8324256232648616038194004650666e-18,
    -1.6284168738284380035666620115626e-18,  2.7501536496752623718284120337066e-19};
constexpr double kAk12cs[] = {
    0.06379308343739001036600488534102,     0.02832887813049720935835030284708,
    -2.475370673905250345414545566732e-4,   5.771972451607248820470976625763e-6,
    -2.068939219536548302745533196552e-7,   9.739983441381804180309213097887e-9,
    -5.585336140380624984688895511129e-10,  3.732996634046185240221212854731e-11,
    -2.825051961023225445135065754928e-12,  2.372019002484144173643496955486e-13,
    -2.176677387991753979268301667938e-14,  2.157914161616032453939562689706e-15,
    -2.290196930718269275991551338154e-16,  2.582885729823274961919939565226e-17,
    -3.07675264126846318762109817344e-18,   3.851487721280491597094896844799e-19};

// Clenshaw recurrence; only half of the leading coefficient enters the sum.
template <std::size_t N>
double chebyshev(double x, const double (&cs)[N]) {
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    const double twox = 2.0 * x;
    for (std::size_t i = N; i-- > 0;) {
        b2 = b1;
        b1 = b0;
        b0 = twox * b1 - b2 + cs[i];
    }
    return 0.5 * (b0 - b2);
}

const double kXsmall = 2.0 * std::sqrt(std::numeric_limits<double>::epsilon());

// I0, I1 on (0, 2].
double bessel_i0_small(double x) {
    if (x <= kXsmall) return 1.0;
    return 2.75 + chebyshev(x * x / 4.5 - 1.0, kBi0cs);
}

double bessel_i1_small(double x) {
    if (x <= kXsmall) return 0.5 * x;
    return x * (chebyshev(x * x / 4.5 - 1.0, kBi1cs) + 0.875);
}

double k0_scaled(double x) {
    if (x <= 2.0) {
        const double y = x > kXsmall ? x * x : 0.0;
        return std::exp(x) * (-std::log(0.5 * x) * bessel_i0_small(x) - 0.25 + chebyshev(0.5 * y - 1.0, kBk0cs));
    }
    if (x <= 8.0) return (chebyshev((16.0 / x - 5.0) / 3.0, kAk0cs) + 1.25) / std::sqrt(x);
    return (chebyshev(16.0 / x - 1.0, kAk02cs) + 1.25) / std::sqrt(x);
}

double k1_scaled(double x) {
    if (x <= 2.0) {
        const double y = x > kXsmall ? x * x : 0.0;
        return std::exp(x) *
               (std::log(0.5 * x) * bessel_i1_small(x) + (0.75 + chebyshev(0.5 * y - 1.0, kBk1cs)) / x);
    }
    if (x <= 8.0) return (chebyshev((16.0 / x - 5.0) / 3.0, kAk1cs) + 1.25) / std::sqrt(x);
    return (chebyshev(16.0 / x - 1.0, kAk12cs) + 1.25) / std::sqrt(x);
}

QuadratureRule build_gauss_hermite(int order) {
    // Golub-Welsch eigenvalues give the starting nodes; Newton on the
    // orthonormal recurrence polishes them and yields the weights.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
    Eigen::VectorXd sub(order - 1);
    for (int k = 1; k < order; ++k) sub(k - 1) = std::sqrt(0.5 * k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    Eigen::VectorXd nodes = solver.eigenvalues();

    const double pim4 = std::pow(std::numbers::pi, -0.25);
    const double big = 1e150;
    Eigen::VectorXd log_weights(order);
    for (int i = 0; i < order; ++i) {
        double x = nodes(i);
        double log_scale = 0.0, pp = 0.0;
        for (int iter = 0; iter < 8; ++iter) {
            double p1 = pim4, p2 = 0.0;
            log_scale = 0.0;
            for (int j = 1; j <= order; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = x * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
                if (std::abs(p1) > big) {
                    p1 /= big;
                    p2 /= big;
                    log_scale += std::log(big);
                }
            }
            pp = std::sqrt(2.0 * order) * p2;
            const double step = p1 / pp;
            x -= step;
            if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
        }
        nodes(i) = x;
        log_weights(i) = std::log(2.0) - 2.0 * (std::log(std::abs(pp)) + log_scale);
    }
    // The outermost weights of high-order rules fall below the double range;
    // they are kept as the smallest positive subnormal.
    Eigen::VectorXd weights =
        log_weights.unaryExpr([](double lw) { return std::max(std::exp(lw), std::numeric_limits<double>::denorm_min()); });

    // Symmetrise: the nodes come out symmetric to rounding, enforce it exactly.
    for (int i = 0; i < order / 2; ++i) {
        const int j = order - 1 - i;
        const double x = 0.5 * (nodes(j) - nodes(i));
        const double w = 0.5 * (weights(i) + weights(j));
        nodes(i) = -x;
        nodes(j) = x;
        weights(i) = weights(j) = w;
    }
    if (order % 2 == 1) nodes(order / 2) = 0.0;
    return {nodes, weights, QuadratureKind::gauss_hermite};
}

}  // namespace

double bessel_k_scaled(int order, double x) {
    if (!std::isfinite(x) || x <= 0.0)
        throw DomainError("bessel_k_scaled: argument must be finite and positive, got " + std::to_string(x));
    switch (order) {
        case 0: return k0_scaled(x);
        case 1: return k1_scaled(x);
        default: throw DomainError("bessel_k_scaled: order must be 0 or 1");
    }
}

double erf(double x) { return std::erf(x); }
double erfc(double x) { return std::erfc(x); }

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double digamma(double x) {
    if (!(x > 0.0)) throw DomainError("digamma: argument must be positive");
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    // log x - 1/(2x) - sum B_2k / (2k x^2k)
    const double r = 1.0 / (x * x);
    const double series =
        r * (1.0 / 12 - r * (1.0 / 120 - r * (1.0 / 252 - r * (1.0 / 240 - r * (1.0 / 132 - r * (691.0 / 32760 - r / 12))))));
    return acc + std::log(x) - 0.5 / x - series;
}

double trigamma(double x) {
    if (!(x > 0.0)) throw DomainError("trigamma: argument must be positive");
    double acc = 0.0;
    while (x < 10.0) {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    // 1/x + 1/(2x^2) + sum B_2k / x^(2k+1)
    const double r = 1.0 / (x * x);
    const double series =
        (r / x) * (1.0 / 6 - r * (1.0 / 30 - r * (1.0 / 42 - r * (1.0 / 30 - r * (5.0 / 66 - r * (691.0 / 2730 - r * 7.0 / 6))))));
    return acc + 1.0 / x + 0.5 * r + series;
}

const QuadratureRule& gauss_hermite_rule(int order) {
    if (order < 2 || order > 512)
        throw DomainError("gauss_hermite_rule: order must lie in [2, 512], got " + std::to_string(order));
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<const QuadratureRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[order];
    if (!slot) slot = std::make_unique<const QuadratureRule>(build_gauss_hermite(order));
    return *slot;
}

}  // namespace ubbs1::specfun
