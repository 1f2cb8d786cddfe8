//! Standard normal distribution function and quantile.
//!
//! `cdf_normal` evaluates the complementary error function with the piecewise
//! rational approximations used by Boost.Math (and statrs), accurate to a few
//! ulps. `quantile_normal` starts from Acklam's rational approximation
//! (relative error about 1e-9) and polishes it with one Halley step against
//! `cdf_normal`.

#![allow(clippy::excessive_precision)]

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};

/// Standard normal cumulative distribution function.
pub fn cdf_normal(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let z = x / SQRT_2;
    if z < 0.0 {
        0.5 * erfc(-z)
    } else {
        1.0 - 0.5 * erfc(z)
    }
}

/// Standard normal density.
pub fn pdf_normal(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Inverse of [`cdf_normal`] on the open unit interval.
pub fn quantile_normal(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "normal quantile requires 0 < p < 1, got {p}"
        )));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    let x = acklam(p);
    // Halley refinement
    let e = cdf_normal(x) - p;
    let u = e / pdf_normal(x);
    Ok(x - u / (1.0 + 0.5 * x * u))
}

/// Upper-tail critical value `z` with `P(Z > z) = tail`.
pub fn upper_critical(tail: f64) -> Result<f64> {
    quantile_normal(1.0 - tail).map_err(|_| {
        Error::Domain(format!("tail probability must be in (0, 1), got {tail}"))
    })
}

fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    let tail = |q: f64| {
        let t = (-2.0 * q.ln()).sqrt();
        (((((C[0] * t + C[1]) * t + C[2]) * t + C[3]) * t + C[4]) * t + C[5])
            / ((((D[0] * t + D[1]) * t + D[2]) * t + D[3]) * t + 1.0)
    };

    if p < P_LOW {
        tail(p)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail(1.0 - p)
    }
}

fn polynomial(z: f64, coeff: &[f64]) -> f64 {
    coeff.iter().rev().fold(0.0, |acc, &c| acc * z + c)
}

/// Complementary error function for `z >= 0`.
fn erfc(z: f64) -> f64 {
    debug_assert!(z >= 0.0);
    if z < 0.5 {
        let erf = if z < 1e-10 {
            z * 1.125 + z * 0.003_379_167_095_512_573_9
        } else {
            z * 1.125 + z * polynomial(z, ERFC_AN) / polynomial(z, ERFC_AD)
        };
        return 1.0 - erf;
    }
    if z >= 110.0 {
        return 0.0;
    }
    // offsets are single-precision constants in the original tables
    let (r, b) = if z < 0.75 {
        (polynomial(z - 0.5, ERFC_BN) / polynomial(z - 0.5, ERFC_BD), 0.344_024_211_2_f32 as f64)
    } else if z < 1.25 {
        (polynomial(z - 0.75, ERFC_CN) / polynomial(z - 0.75, ERFC_CD), 0.419_990_927_f32 as f64)
    } else if z < 2.25 {
        (polynomial(z - 1.25, ERFC_DN) / polynomial(z - 1.25, ERFC_DD), 0.489_862_501_6_f32 as f64)
    } else if z < 3.5 {
        (polynomial(z - 2.25, ERFC_EN) / polynomial(z - 2.25, ERFC_ED), 0.531_737_089_2_f32 as f64)
    } else if z < 5.25 {
        (polynomial(z - 3.5, ERFC_FN) / polynomial(z - 3.5, ERFC_FD), 0.548_997_342_6_f32 as f64)
    } else if z < 8.0 {
        (polynomial(z - 5.25, ERFC_GN) / polynomial(z - 5.25, ERFC_GD), 0.557_174_086_6_f32 as f64)
    } else if z < 11.5 {
        (polynomial(z - 8.0, ERFC_HN) / polynomial(z - 8.0, ERFC_HD), 0.560_980_796_8_f32 as f64)
    } else if z < 17.0 {
        (polynomial(z - 11.5, ERFC_IN) / polynomial(z - 11.5, ERFC_ID), 0.562_649_369_2_f32 as f64)
    } else if z < 24.0 {
        (polynomial(z - 17.0, ERFC_JN) / polynomial(z - 17.0, ERFC_JD), 0.563_459_813_6_f32 as f64)
    } else if z < 38.0 {
        (polynomial(z - 24.0, ERFC_KN) / polynomial(z - 24.0, ERFC_KD), 0.563_847_780_2_f32 as f64)
    } else if z < 60.0 {
        (polynomial(z - 38.0, ERFC_LN) / polynomial(z - 38.0, ERFC_LD), 0.564_052_820_2_f32 as f64)
    } else if z < 85.0 {
        (polynomial(z - 60.0, ERFC_MN) / polynomial(z - 60.0, ERFC_MD), 0.564_130_902_3_f32 as f64)
    } else {
        (polynomial(z - 85.0, ERFC_NN) / polynomial(z - 85.0, ERFC_ND), 0.564_158_439_6_f32 as f64)
    };
    let g = (-z * z).exp() / z;
    g * b + g * r
}

// Rational approximation coefficients for erfc, by interval of z.
const ERFC_AN: &[f64] = &[
    0.00337916709551257388990745,
    -0.00073695653048167948530905,
    -0.374732337392919607868241,
    0.0817442448733587196071743,
    -0.0421089319936548595203468,
    0.0070165709512095756344528,
    -0.00495091255982435110337458,
    0.000871646599037922480317225,
];

const ERFC_AD: &[f64] = &[
    1.0,
    -0.218088218087924645390535,
    0.412542972725442099083918,
    -0.0841891147873106755410271,
    0.0655338856400241519690695,
    -0.0120019604454941768171266,
    0.00408165558926174048329689,
    -0.000615900721557769691924509,
];

const ERFC_BN: &[f64] = &[
    -0.0361790390718262471360258,
    0.292251883444882683221149,
    0.281447041797604512774415,
    0.125610208862766947294894,
    0.0274135028268930549240776,
    0.00250839672168065762786937,
];

const ERFC_BD: &[f64] = &[
    1.0,
    1.8545005897903486499845,
    1.43575803037831418074962,
    0.582827658753036572454135,
    0.124810476932949746447682,
    0.0113724176546353285778481,
];

const ERFC_CN: &[f64] = &[
    -0.0397876892611136856954425,
    0.153165212467878293257683,
    0.191260295600936245503129,
    0.10276327061989304213645,
    0.029637090615738836726027,
    0.0046093486780275489468812,
    0.000307607820348680180548455,
];

const ERFC_CD: &[f64] = &[
    1.0,
    1.95520072987627704987886,
    1.64762317199384860109595,
    0.768238607022126250082483,
    0.209793185936509782784315,
    0.0319569316899913392596356,
    0.00213363160895785378615014,
];

const ERFC_DN: &[f64] = &[
    -0.0300838560557949717328341,
    0.0538578829844454508530552,
    0.0726211541651914182692959,
    0.0367628469888049348429018,
    0.00964629015572527529605267,
    0.00133453480075291076745275,
    0.778087599782504251917881e-4,
];

const ERFC_DD: &[f64] = &[
    1.0,
    1.75967098147167528287343,
    1.32883571437961120556307,
    0.552528596508757581287907,
    0.133793056941332861912279,
    0.0179509645176280768640766,
    0.00104712440019937356634038,
    -0.106640381820357337177643e-7,
];

const ERFC_EN: &[f64] = &[
    -0.0117907570137227847827732,
    0.014262132090538809896674,
    0.0202234435902960820020765,
    0.00930668299990432009042239,
    0.00213357802422065994322516,
    0.00025022987386460102395382,
    0.120534912219588189822126e-4,
];

const ERFC_ED: &[f64] = &[
    1.0,
    1.50376225203620482047419,
    0.965397786204462896346934,
    0.339265230476796681555511,
    0.0689740649541569716897427,
    0.00771060262491768307365526,
    0.000371421101531069302990367,
];

const ERFC_FN: &[f64] = &[
    -0.00546954795538729307482955,
    0.00404190278731707110245394,
    0.0054963369553161170521356,
    0.00212616472603945399437862,
    0.000394984014495083900689956,
    0.365565477064442377259271e-4,
    0.135485897109932323253786e-5,
];

const ERFC_FD: &[f64] = &[
    1.0,
    1.21019697773630784832251,
    0.620914668221143886601045,
    0.173038430661142762569515,
    0.0276550813773432047594539,
    0.00240625974424309709745382,
    0.891811817251336577241006e-4,
    -0.465528836283382684461025e-11,
];

const ERFC_GN: &[f64] = &[
    -0.00270722535905778347999196,
    0.0013187563425029400461378,
    0.00119925933261002333923989,
    0.00027849619811344664248235,
    0.267822988218331849989363e-4,
    0.923043672315028197865066e-6,
];

const ERFC_GD: &[f64] = &[
    1.0,
    0.814632808543141591118279,
    0.268901665856299542168425,
    0.0449877216103041118694989,
    0.00381759663320248459168994,
    0.000131571897888596914350697,
    0.404815359675764138445257e-11,
];

const ERFC_HN: &[f64] = &[
    -0.00109946720691742196814323,
    0.000406425442750422675169153,
    0.000274499489416900707787024,
    0.465293770646659383436343e-4,
    0.320955425395767463401993e-5,
    0.778286018145020892261936e-7,
];

const ERFC_HD: &[f64] = &[
    1.0,
    0.588173710611846046373373,
    0.139363331289409746077541,
    0.0166329340417083678763028,
    0.00100023921310234908642639,
    0.24254837521587225125068e-4,
];

const ERFC_IN: &[f64] = &[
    -0.00056907993601094962855594,
    0.000169498540373762264416984,
    0.518472354581100890120501e-4,
    0.382819312231928859704678e-5,
    0.824989931281894431781794e-7,
];

const ERFC_ID: &[f64] = &[
    1.0,
    0.339637250051139347430323,
    0.043472647870310663055044,
    0.00248549335224637114641629,
    0.535633305337152900549536e-4,
    -0.117490944405459578783846e-12,
];

const ERFC_JN: &[f64] = &[
    -0.000241313599483991337479091,
    0.574224975202501512365975e-4,
    0.115998962927383778460557e-4,
    0.581762134402593739370875e-6,
    0.853971555085673614607418e-8,
];

const ERFC_JD: &[f64] = &[
    1.0,
    0.233044138299687841018015,
    0.0204186940546440312625597,
    0.000797185647564398289151125,
    0.117019281670172327758019e-4,
];

const ERFC_KN: &[f64] = &[
    -0.000146674699277760365803642,
    0.162666552112280519955647e-4,
    0.269116248509165239294897e-5,
    0.979584479468091935086972e-7,
    0.101994647625723465722285e-8,
];

const ERFC_KD: &[f64] = &[
    1.0,
    0.165907812944847226546036,
    0.0103361716191505884359634,
    0.000286593026373868366935721,
    0.298401570840900340874568e-5,
];

const ERFC_LN: &[f64] = &[
    -0.583905797629771786720406e-4,
    0.412510325105496173512992e-5,
    0.431790922420250949096906e-6,
    0.993365155590013193345569e-8,
    0.653480510020104699270084e-10,
];

const ERFC_LD: &[f64] = &[
    1.0,
    0.105077086072039915406159,
    0.00414278428675475620830226,
    0.726338754644523769144108e-4,
    0.477818471047398785369849e-6,
];

const ERFC_MN: &[f64] = &[
    -0.196457797609229579459841e-4,
    0.157243887666800692441195e-5,
    0.543902511192700878690335e-7,
    0.317472492369117710852685e-9,
];

const ERFC_MD: &[f64] = &[
    1.0,
    0.052803989240957632204885,
    0.000926876069151753290378112,
    0.541011723226630257077328e-5,
    0.535093845803642394908747e-15,
];

const ERFC_NN: &[f64] = &[
    -0.789224703978722689089794e-5,
    0.622088451660986955124162e-6,
    0.145728445676882396797184e-7,
    0.603715505542715364529243e-10,
];

const ERFC_ND: &[f64] = &[
    1.0,
    0.0375328846356293715248719,
    0.000467919535974625308126054,
    0.193847039275845656900547e-5,
];
