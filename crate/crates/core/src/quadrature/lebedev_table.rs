//! Octahedrally symmetric sphere rules (Lebedev–Laikov), stored by orbit generator.
//! Weights are normalized to sum to one; callers scale by the sphere area.

use super::Orbit;

pub(super) const TABLE: &[(usize, &[Orbit])] = &[
    (26, RULE_26),
    (110, RULE_110),
    (194, RULE_194),
    (302, RULE_302),
    (434, RULE_434),
    (590, RULE_590),
];

#[rustfmt::skip]
const RULE_26: &[Orbit] = &[
    Orbit::A1 { w: 4.76190476190476233e-02 },
    Orbit::A2 { w: 3.80952380952380987e-02 },
    Orbit::A3 { w: 3.21428571428571397e-02 },
];

#[rustfmt::skip]
const RULE_110: &[Orbit] = &[
    Orbit::A1 { w: 3.82827049493716150e-03 },
    Orbit::A3 { w: 9.79373751248751277e-03 },
    Orbit::B { l: 1.85115635344736212e-01, m: 9.65124035086594056e-01, w: 8.21173728319111139e-03 },
    Orbit::B { l: 6.90421048382292235e-01, m: 2.15957291845848443e-01, w: 9.94281489117810301e-03 },
    Orbit::B { l: 3.95689473055941876e-01, m: 8.28769981252592269e-01, w: 9.59547133607096224e-03 },
    Orbit::C { p: 8.78158910604066145e-01, q: 4.78369028812150210e-01, w: 9.69499636166302851e-03 },
];

#[rustfmt::skip]
const RULE_194: &[Orbit] = &[
    Orbit::A1 { w: 1.78234044724461102e-03 },
    Orbit::A2 { w: 5.71690594997710175e-03 },
    Orbit::A3 { w: 5.57338317884873737e-03 },
    Orbit::B { l: 6.71297344269522589e-01, m: 3.14196994182586287e-01, w: 5.60870408258799715e-03 },
    Orbit::B { l: 2.89246562757543901e-01, m: 9.12509096867473724e-01, w: 5.15823771180538328e-03 },
    Orbit::B { l: 4.44693317871743710e-01, m: 7.77493219314767114e-01, w: 5.51877146727361434e-03 },
    Orbit::B { l: 1.29933544765006709e-01, m: 9.82972302707253220e-01, w: 4.10677702816939372e-03 },
    Orbit::C { p: 9.38319218137591560e-01, q: 3.45770219761128317e-01, w: 5.05184606461480789e-03 },
    Orbit::D { r: 8.36036015482458872e-01, s: 5.25118572443642018e-01, t: 1.59041710538353004e-01, w: 5.53024891623309436e-03 },
];

#[rustfmt::skip]
const RULE_302: &[Orbit] = &[
    Orbit::A1 { w: 8.54591172512814828e-04 },
    Orbit::A3 { w: 3.59911928502557087e-03 },
    Orbit::B { l: 3.51564034557010519e-01, m: 8.67643624544083392e-01, w: 3.44978842430588304e-03 },
    Orbit::B { l: 6.56632941021961236e-01, m: 3.71034178384820945e-01, w: 3.60482260141988193e-03 },
    Orbit::B { l: 4.72905413258100482e-01, m: 7.43452042987555739e-01, w: 3.57672966174336698e-03 },
    Orbit::B { l: 9.61830852261478381e-02, m: 9.90705621379408097e-01, w: 2.35210141368916419e-03 },
    Orbit::B { l: 2.21964523629417793e-01, m: 9.49454317226443134e-01, w: 3.10895312241367492e-03 },
    Orbit::B { l: 7.01176641608954543e-01, m: 1.29238672710514424e-01, w: 3.65004580767725514e-03 },
    Orbit::C { p: 9.64408914879205992e-01, q: 2.64415288706066287e-01, w: 2.98234496317180409e-03 },
    Orbit::C { p: 8.20326419827759334e-01, q: 5.71895589187896070e-01, w: 3.60082093221646008e-03 },
    Orbit::D { r: 8.00072749407395145e-01, s: 5.44867737258077356e-01, t: 2.51003475177046520e-01, w: 3.57154055427338695e-03 },
    Orbit::D { r: 9.02442529533000415e-01, s: 4.12772408316853079e-01, t: 1.23354853258332703e-01, w: 3.39231220500616978e-03 },
];

#[rustfmt::skip]
const RULE_434: &[Orbit] = &[
    Orbit::A1 { w: 5.26589796822443581e-04 },
    Orbit::A2 { w: 2.54821997200260688e-03 },
    Orbit::A3 { w: 2.51231741892730693e-03 },
    Orbit::B { l: 6.90934630750911105e-01, m: 2.12646824707551862e-01, w: 2.53040380118635519e-03 },
    Orbit::B { l: 1.77483605460915794e-01, m: 9.67987158791472790e-01, w: 2.01427902091852809e-03 },
    Orbit::B { l: 4.91434263778474600e-01, m: 7.19016501040843470e-01, w: 2.50172516840293548e-03 },
    Orbit::B { l: 6.45666470742425558e-01, m: 4.07712664897769750e-01, w: 2.51326717459756386e-03 },
    Orbit::B { l: 2.86128901030763827e-01, m: 9.14472801120872480e-01, w: 2.30269478222741618e-03 },
    Orbit::B { l: 7.56808436717801847e-02, m: 9.94255912631277883e-01, w: 1.46249562159461396e-03 },
    Orbit::B { l: 3.92725976336800175e-01, m: 8.31584400419232317e-01, w: 2.44537343731297992e-03 },
    Orbit::C { p: 8.81813287779428800e-01, q: 4.71598691151315974e-01, w: 2.41744237563898097e-03 },
    Orbit::C { p: 9.77642811118264898e-01, q: 2.10272522857306798e-01, w: 1.91095128217953205e-03 },
    Orbit::D { r: 8.68946032287241210e-01, s: 4.50233038258262497e-01, t: 2.05482369640304391e-01, w: 2.41693004432477505e-03 },
    Orbit::D { r: 7.99927854385728554e-01, s: 5.90515704892527138e-01, t: 1.06801826075804879e-01, w: 2.51223685456349521e-03 },
    Orbit::D { r: 7.71746262691590079e-01, s: 5.55015236107680665e-01, t: 3.10428403516654461e-01, w: 2.49664405455308613e-03 },
    Orbit::D { r: 9.37180985855372239e-01, s: 3.34436314534345525e-01, t: 9.92176963642924792e-02, w: 2.23660776043784881e-03 },
];

#[rustfmt::skip]
const RULE_590: &[Orbit] = &[
    Orbit::A1 { w: 3.09512129530618721e-04 },
    Orbit::A3 { w: 1.85237969859748902e-03 },
    Orbit::B { l: 7.04095493822746943e-01, m: 9.21904070768982536e-02, w: 1.87179063927774393e-03 },
    Orbit::B { l: 6.80774406645524355e-01, m: 2.70356088359164803e-01, w: 1.85881258543831702e-03 },
    Orbit::B { l: 6.37254693925875193e-01, m: 4.33373868777154392e-01, w: 1.85202882829621322e-03 },
    Orbit::B { l: 5.04441970780035831e-01, m: 7.00768575373572955e-01, w: 1.84671595615124202e-03 },
    Orbit::B { l: 4.21576178401096680e-01, m: 8.02836877335273758e-01, w: 1.81847177816276892e-03 },
    Orbit::B { l: 3.31792073647212304e-01, m: 8.83078727934132557e-01, w: 1.74956465728115409e-03 },
    Orbit::B { l: 2.38473670142188704e-01, m: 9.41414158220402530e-01, w: 1.61721064725441109e-03 },
    Orbit::B { l: 1.45903644915776287e-01, m: 9.78480583762693867e-01, w: 1.38473723485169195e-03 },
    Orbit::B { l: 6.09503411550719604e-02, m: 9.96278129754016417e-01, w: 9.76433116505105009e-04 },
    Orbit::C { p: 7.91101929626901956e-01, q: 6.11684344200987606e-01, w: 1.85716119677407790e-03 },
    Orbit::C { p: 9.18045287711453994e-01, q: 3.96475534819985820e-01, w: 1.70515399639586430e-03 },
    Orbit::C { p: 9.85013335028001924e-01, q: 1.72478200990772407e-01, w: 1.30032168588604794e-03 },
    Orbit::D { r: 7.49310611904115853e-01, s: 5.61026380862206020e-01, t: 3.51828092773351919e-01, w: 1.84286647290528597e-03 },
    Orbit::D { r: 8.40047488359050409e-01, s: 4.74239284255198013e-01, t: 2.63471665593794979e-01, w: 1.80265893437745101e-03 },
    Orbit::D { r: 7.80320742479920337e-01, s: 5.98412649788538031e-01, t: 1.81664084036020912e-01, w: 1.84983056044366002e-03 },
    Orbit::D { r: 9.09213475092373602e-01, s: 3.79103540769556324e-01, t: 1.72079522565687787e-01, w: 1.71390450710670909e-03 },
    Orbit::D { r: 9.57102074310072548e-01, s: 2.77867319058624385e-01, t: 8.21302158193251142e-02, w: 1.55521360339680795e-03 },
    Orbit::D { r: 8.59379855890721189e-01, s: 5.03356427107511717e-01, t: 8.99920584207487551e-02, w: 1.80223912800852475e-03 },
];

