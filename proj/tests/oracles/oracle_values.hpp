// Generated by tests/oracles/compute_oracles.py. Do not edit.
#pragma once
namespace oracle {
inline constexpr double kNormalX[] = {-8.0, -3.0, -1.0, 0.0, 0.5, 2.0, 6.0};
inline constexpr double kNormalCdf[] = {6.220960574271784e-16, 0.0013498980316300946, 0.15865525393145705, 0.5, 0.6914624612740131, 0.9772498680518208, 0.9999999990134123};
inline constexpr double kNormalP[] = {1e-10, 0.001, 0.1, 0.5, 0.9, 0.975, 0.999999999};
inline constexpr double kNormalQuantile[] = {-6.361340902404057, -3.0902323061678136, -1.2815515655446004, 0.0, 1.2815515655446006, 1.9599639845400538, 5.9978070196016375};
inline constexpr double kKolmogorovLambda[] = {0.3, 0.6, 1.0, 1.1799, 1.18, 1.36, 2.0, 3.0};
inline constexpr double kKolmogorovSf[] = {0.9999906941986655, 0.8642827790506042, 0.26999967167735456, 0.12351204971188676, 0.1234538094297657, 0.049485876755377876, 0.0006709252557796953, 3.045995948942526e-08};
inline constexpr double kKsD[] = {0.05, 0.01, 0.003, 0.2};
inline constexpr double kKsN[] = {100.0, 10000.0, 100000.0, 30.0};
inline constexpr double kKsP[] = {0.9596004458626864, 0.2687038049688466, 0.32866023293988333, 0.16014114551077294};
inline constexpr double kCritN[] = {1000.0, 100000.0, 100000.0};
inline constexpr double kCritAlpha[] = {0.005, 0.005, 0.0025};
inline constexpr double kCrit[] = {0.05452039538224986, 0.0054712460876912275, 0.005779068549089746};
inline constexpr double kKsSample[] = {0.91, 0.05, 0.33, 0.5, 0.72, 0.18, 0.64, 0.99, 0.27, 0.41};
inline constexpr double kKsSampleStat[] = {0.10999999999999999};
inline constexpr double kUniV[] = {-2.5, -0.3, 0.0, 0.7, 3.1};
inline constexpr double kLaplaceLogPdf[] = {-2.929657784563292, -1.6355401375044685, -1.4590695492691745, -1.4002460198574098, -2.812010725739763};
inline constexpr double kLaplaceCdf[] = {0.09080603475707048, 0.3312400676969631, 0.3951691814907491, 0.5808882837885001, 0.8978571009105509};
inline constexpr double kLogisticLogPdf[] = {-2.4346359172708896, -1.1787352884434776, -1.2592578052388275, -1.679683004651295, -4.298951938382978};
inline constexpr double kLogisticCdf[] = {0.07585818002124355, 0.5621765008857981, 0.6513548646660542, 0.8175744761936437, 0.9890130573694068};
inline constexpr double kExponentialCdf[] = {0.0, 0.0, 0.0, 0.8262260565495548, 0.9995692574594243};
inline constexpr double kUniP[] = {0.01, 0.3, 0.5, 0.77, 0.999};
inline constexpr double kLaplaceQuantile[] = {-6.250439109227847, -0.4684035604021842, 0.4, 1.7200989421482937, 10.964833767317725};
inline constexpr double kLogisticQuantile[] = {-4.176095880107672, -1.1778382883097631, -0.5, 0.46664896473962747, 5.025403822918843};
inline constexpr double kGaussMean[] = {0.5, -1.0, 2.0};
inline constexpr double kGaussCov[] = {2.0, 0.3, -0.4, 0.3, 1.0, 0.2, -0.4, 0.2, 1.5};
inline constexpr double kGaussPoint[] = {0.1, 0.2, 1.4};
inline constexpr double kGaussLogPdf[] = {-4.489189489003653};
inline constexpr double kGaussCondCdf2[] = {0.18922766370929506};
inline constexpr double kGaussCondCdf1[] = {0.901360768430262};
inline constexpr double kMixPoint[] = {0.2, 0.1};
inline constexpr double kMixLogPdf[] = {-2.644999825200533};
inline constexpr double kMixCondCdf1[] = {0.4876860979628457};
inline constexpr double kMixCdf0[] = {0.3205338214010873};
inline constexpr double kQuarticLogPartition0[] = {0.9414489344181048};
inline constexpr double kQuarticCdfAtHalf0[] = {0.694424289046469};
inline constexpr double kQuarticLogPartition1[] = {1.638046196721494};
inline constexpr double kQuarticCdfAtHalf1[] = {0.25179952976177733};
inline constexpr double kKrSourceCov[] = {1.5, 0.4, 0.4, 0.9};
inline constexpr double kKrTargetCov[] = {0.7, -0.2, -0.2, 2.0};
inline constexpr double kKrPoint[] = {0.3, -1.2};
inline constexpr double kKrImage[] = {1.0683130051063974, 1.217337003905352};
inline constexpr double kKrImageByCdf[] = {1.0683130051063974, 1.2173370039053517};
inline constexpr double kCeMu1[] = {0.3, -0.2};
inline constexpr double kCeMu2[] = {1.1, 0.5};
inline constexpr double kCeF1[] = {1.0, 0.5, -0.3, 2.0, 0.7, 0.1};
inline constexpr double kCeAlpha1[] = {0.2, -0.4, 1.0};
inline constexpr double kCeR[] = {0.1327433628318584, 0.991150442477876, 0.991150442477876, -0.1327433628318585};
inline constexpr double kCeF2[] = {0.6283185840707963, 0.9247787610619467, 1.9424778761061945, -0.5628318584070797, 0.19203539823008847, 0.6805309734513273};
inline constexpr double kCeAlpha2[] = {0.3964601769911505, -1.5853097345132743, 1.2684955752212388};
inline constexpr double kCeDistance[] = {3.5370103870184075};
inline constexpr double kSpearmanA[] = {1.0, 2.0, 2.0, 3.5, -1.0, 0.0, 7.0, 2.0, 5.0, 4.0};
inline constexpr double kSpearmanB[] = {0.3, 0.1, 0.9, 0.9, -2.0, 1.0, 3.0, 0.2, 0.2, 2.5};
inline constexpr double kSpearmanRho[] = {0.475317697801893};
inline constexpr double kRelTa[] = {-1.4238250364546312, 1.2637284581291104, -0.8706617379590857, -0.2591732349343976, -0.07534330701052097, -0.740884652085609, -1.3677927017829434, 0.6488928021930399, 0.361058113054895, -1.95286306301219, 2.347409654378852, 0.9684969057519236, -0.7593871804245066, 0.9021982742122517, -0.46695317332055025, -0.06068951873702798};
inline constexpr double kRelTb[] = {-1.1223577279851107, 0.42556359610828104, -0.9039033257684284, -0.9321502766125551, 0.10385415925730274, -1.573101714718322, -1.2831027383829485, -0.08676377505250712, 0.2588600517706977, -2.666113045005154, 4.395077233144183, -0.9302422476190849, -0.26095406162869583, -0.024243632239168242, -0.21693195403752885, -0.9001793310377839};
inline constexpr double kRelL[] = {1.4936985403149385, -0.2992920569069907, 0.39966070512071017, 0.7981162156326257};
inline constexpr double kRelD[] = {0.503993818274275, -0.9970746364750922};
inline constexpr double kRelResidual[] = {0.013828060824721117};
inline constexpr double kMeEtas[] = {0.0, 0.0, 1.0, 0.2, -0.5, 1.0, 0.3, -0.7};
inline constexpr double kMeX[] = {0.1, 0.9, -0.2, 1.3, 0.4, 0.6, 0.2, 2.1, -1.0, 0.8, -0.5, 0.4};
inline constexpr double kMeOffset[] = {0.41820455297708803, 0.6706538928321876, -0.16768783788753622};
inline constexpr double kMeLoading[] = {0.8567540730388736, 0.08355705932109896, -0.5170644698613509, 1.2620720091206652, 0.8507962193372802, -0.4197712478393589};
}  // namespace oracle
