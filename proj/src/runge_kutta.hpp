#pragma once

// Embedded explicit Runge-Kutta pairs with a first-same-as-last final stage:
// s stages give y_new, one more evaluation at (t + h, y_new) feeds the error
// estimate and the next step.

#include <array>
#include <vector>

namespace uscprobe::detail {

struct EmbeddedPair {
    int stages = 0;                          // s
    std::vector<double> c;                   // s nodes
    std::vector<std::vector<double>> a;      // a[i][j], j < i
    std::vector<double> b;                   // s weights of the propagating solution
    std::vector<double> e_main;              // s + 1 error weights
    std::vector<double> e_aux;               // s + 1 weights of the auxiliary estimate, empty for DOPRI5
    double error_exponent = 0.0;             // step factor ~ err^(-error_exponent)
};

// Dormand & Prince (1980) 5(4).
inline const EmbeddedPair& dopri5() {
    static const EmbeddedPair pair = [] {
        EmbeddedPair p;
        p.stages = 6;
        p.c = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0};
        p.a = {{},
               {1.0 / 5},
               {3.0 / 40, 9.0 / 40},
               {44.0 / 45, -56.0 / 15, 32.0 / 9},
               {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
               {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656}};
        p.b = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84};
        p.e_main = {71.0 / 57600, 0.0,           -71.0 / 16695, 71.0 / 1920,
                    -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
        p.error_exponent = 1.0 / 5.0;
        return p;
    }();
    return pair;
}

// Dormand & Prince 8(5,3) as published by Hairer, Norsett & Wanner.
inline const EmbeddedPair& dop853() {
    static const EmbeddedPair pair = [] {
        EmbeddedPair p;
        p.stages = 12;
        p.c = {0.0,
               0.526001519587677318785587544488e-01,
               0.789002279381515978178381316732e-01,
               0.118350341907227396726757197510,
               0.281649658092772603273242802490,
               0.333333333333333333333333333333,
               0.25,
               0.307692307692307692307692307692,
               0.651282051282051282051282051282,
               0.6,
               0.857142857142857142857142857142,
               1.0};
        p.a.assign(12, std::vector<double>(12, 0.0));
        auto& a = p.a;
        a[1][0] = 5.26001519587677318785587544488e-2;
        a[2][0] = 1.97250569845378994544595329183e-2;
        a[2][1] = 5.91751709536136983633785987549e-2;
        a[3][0] = 2.95875854768068491816892993775e-2;
        a[3][2] = 8.87627564304205475450678981324e-2;
        a[4][0] = 2.41365134159266685502369798665e-1;
        a[4][2] = -8.84549479328286085344864962717e-1;
        a[4][3] = 9.24834003261792003115737966543e-1;
        a[5][0] = 3.7037037037037037037037037037e-2;
        a[5][3] = 1.70828608729473871279604482173e-1;
        a[5][4] = 1.25467687566822425016691814123e-1;
        a[6][0] = 3.7109375e-2;
        a[6][3] = 1.70252211019544039314978060272e-1;
        a[6][4] = 6.02165389804559606850219397283e-2;
        a[6][5] = -1.7578125e-2;
        a[7][0] = 3.70920001185047927108779319836e-2;
        a[7][3] = 1.70383925712239993810214054705e-1;
        a[7][4] = 1.07262030446373284651809199168e-1;
        a[7][5] = -1.53194377486244017527936158236e-2;
        a[7][6] = 8.27378916381402288758473766002e-3;
        a[8][0] = 6.24110958716075717114429577812e-1;
        a[8][3] = -3.36089262944694129406857109825;
        a[8][4] = -8.68219346841726006818189891453e-1;
        a[8][5] = 2.75920996994467083049415600797e1;
        a[8][6] = 2.01540675504778934086186788979e1;
        a[8][7] = -4.34898841810699588477366255144e1;
        a[9][0] = 4.77662536438264365890433908527e-1;
        a[9][3] = -2.48811461997166764192642586468;
        a[9][4] = -5.90290826836842996371446475743e-1;
        a[9][5] = 2.12300514481811942347288949897e1;
        a[9][6] = 1.52792336328824235832596922938e1;
        a[9][7] = -3.32882109689848629194453265587e1;
        a[9][8] = -2.03312017085086261358222928593e-2;
        a[10][0] = -9.3714243008598732571704021658e-1;
        a[10][3] = 5.18637242884406370830023853209;
        a[10][4] = 1.09143734899672957818500254654;
        a[10][5] = -8.14978701074692612513997267357;
        a[10][6] = -1.85200656599969598641566180701e1;
        a[10][7] = 2.27394870993505042818970056734e1;
        a[10][8] = 2.49360555267965238987089396762;
        a[10][9] = -3.0467644718982195003823669022;
        a[11][0] = 2.27331014751653820792359768449;
        a[11][3] = -1.05344954667372501984066689879e1;
        a[11][4] = -2.00087205822486249909675718444;
        a[11][5] = -1.79589318631187989172765950534e1;
        a[11][6] = 2.79488845294199600508499808837e1;
        a[11][7] = -2.85899827713502369474065508674;
        a[11][8] = -8.87285693353062954433549289258;
        a[11][9] = 1.23605671757943030647266201528e1;
        a[11][10] = 6.43392746015763530355970484046e-1;

        p.b = {5.42937341165687622380535766363e-2,
               0.0,
               0.0,
               0.0,
               0.0,
               4.45031289275240888144113950566,
               1.89151789931450038304281599044,
               -5.8012039600105847814672114227,
               3.1116436695781989440891606237e-1,
               -1.52160949662516078556178806805e-1,
               2.01365400804030348374776537501e-1,
               4.47106157277725905176885569043e-2};

        p.e_main.assign(13, 0.0);
        p.e_main[0] = 0.1312004499419488073250102996e-1;
        p.e_main[5] = -0.1225156446376204440720569753e+1;
        p.e_main[6] = -0.4957589496572501915214079952;
        p.e_main[7] = 0.1664377182454986536961530415e+1;
        p.e_main[8] = -0.3503288487499736816886487290;
        p.e_main[9] = 0.3341791187130174790297318841;
        p.e_main[10] = 0.8192320648511571246570742613e-1;
        p.e_main[11] = -0.2235530786388629525884427845e-1;

        p.e_aux.assign(13, 0.0);
        for (int i = 0; i < 12; ++i) p.e_aux[i] = p.b[i];
        p.e_aux[0] -= 0.244094488188976377952755905512;
        p.e_aux[8] -= 0.733846688281611857341361741547;
        p.e_aux[11] -= 0.220588235294117647058823529412e-1;

        p.error_exponent = 1.0 / 8.0;
        return p;
    }();
    return pair;
}

}  // namespace uscprobe::detail
