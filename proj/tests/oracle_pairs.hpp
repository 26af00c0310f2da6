#pragma once

namespace oracle {

// Frozen reference energies: polyline with 200 segments relaxed vertex by
// vertex (see oracles.hpp). Columns: p, q, theta, E_oracle.
struct GeodesicPair {
  double p[3], q[3], theta, energy;
};
inline constexpr GeodesicPair kGeodesicPairs[] = {
    {{-1.0906437001411726, 1.9128915848568169, -0.76794893110358209},
     {-0.72411108875654739, -0.17766036864047385, -0.94451663686102649}, -1.6530262590375537,
     1.4171248914715118},
    {{-0.32251115695382371, 0.11105916509393854, -0.67664300668636423},
     {-1.9363585633519673, 1.4752058244116886, -0.42823076212691036}, 0.69732170465023868,
     2.3251383648784563},
    {{0.68926907171322549, -0.61610823942964399, -0.94966489828079381},
     {0.77612632225229738, 1.7181127597131991, 1.003050908469501}, -0.98042375072785748,
     2.7619347675145649},
    {{1.4051783410367831, 1.1630540253114794, -0.20469681254292893},
     {-1.3037889513836216, 1.7505173523995357, -0.46140175729672195}, -0.57009903737305678,
     9.1170299672987731},
    {{-1.2265775188160937, -0.069452375914110798, 1.8049933876585071},
     {-1.5981041039640522, 0.4548138794403207, -0.60497448642048868}, -0.89394118509638076,
     2.8663014158430173},
    {{-0.2139764420335013, -1.2816924189087053, -1.6659676094762523},
     {1.8316549135080051, -1.4291370207698781, 0.18894049660567447}, -0.75916302636919686,
     8.9763749317302626},
    {{-0.86912110293526257, -0.26663134669969502, 1.9448925791429281},
     {1.6839741723335826, -0.32497108381304507, 1.1742799970381177}, -0.62677959987851639,
     6.8268744145110789},
    {{-0.79864367866784436, 0.49302329349001273, -0.96345691799846822},
     {0.015820580928003647, 0.6278892677597514, -0.37920375222816505}, 0.66904307529463125,
     0.62503811881975235},
    {{-0.24199475805064452, 0.73851567835020404, -0.042308549438166976},
     {1.12694204757865, 0.94669784484073549, 1.815965649376543}, -1.3850433276471414,
     7.1512383380214803},
    {{0.59647540776883501, 1.4741263037874552, -0.20838262145868658},
     {0.22965411431397742, -1.4254879439575867, 0.63693328001387517}, 0.64683917860716944,
     1.4546724117033898},
};

}  // namespace oracle
