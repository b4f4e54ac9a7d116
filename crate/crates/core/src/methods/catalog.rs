//! Published coefficient sets, kept as decimal strings at the precision they
//! were published with and parsed on lookup.

use num_complex::Complex64;

use super::{ClaimedOrder, Method, Ordering};
use crate::error::{Error, Result};

/// Every scheme [`catalog`] knows about.
pub const CATALOG_NAMES: [&str; 17] = [
    "strang",
    "yoshida4_complex",
    "chambers6",
    "v82",
    "t84_5",
    "v84_5",
    "t864_7",
    "v864_7",
    "t86_9",
    "v86_9",
    "chin4m",
    "omf4m",
    "v84m4_lr",
    "t84m_5",
    "v84m_5",
    "t86m_5",
    "v86m_5",
];

pub fn catalog_names() -> &'static [&'static str] {
    &CATALOG_NAMES
}

fn parse(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("bad coefficient literal {s}"))
}

/// `(re, im)` decimal pairs to complex numbers.
fn cx(pairs: &[(&str, &str)]) -> Vec<Complex64> {
    pairs.iter().map(|(re, im)| Complex64::new(parse(re), parse(im))).collect()
}

fn re(values: &[&str]) -> Vec<Complex64> {
    values.iter().map(|v| Complex64::new(parse(v), 0.0)).collect()
}

fn real(values: &[f64]) -> Vec<Complex64> {
    values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

fn generalized(s: &[u32]) -> ClaimedOrder {
    ClaimedOrder::Generalized(s.to_vec())
}

/// Complex triple-jump coefficient `alpha = 1 / (2 - 2^{1/3} e^{2 i k pi / 3})`, branch `k = 1`.
pub(crate) fn triple_jump_alpha() -> Complex64 {
    let rot = Complex64::from_polar(2f64.powf(1.0 / 3.0), 2.0 * std::f64::consts::PI / 3.0);
    1.0 / (2.0 - rot)
}

/// `(b1, b2, a1, c1)` of the (8,2) Lobatto-type VTV scheme with four A stages.
fn lobatto4() -> (f64, f64, f64, f64) {
    let a1 = 0.5 - (3.0f64 / 28.0).sqrt();
    let c1 = (3861.0 - 791.0 * 21f64.sqrt()) / 129600.0;
    (1.0 / 20.0, 49.0 / 180.0, a1, c1)
}

/// Look up a scheme by name.
pub fn catalog(name: &str) -> Result<Method> {
    use Ordering::{Tvt, Vtv};
    match name {
        "strang" => Method::new(name, Vtv, vec![], vec![], None, ClaimedOrder::Classical(2)),
        "yoshida4_complex" => {
            let alpha = triple_jump_alpha();
            Method::new(name, Vtv, vec![alpha], vec![alpha / 2.0], None, ClaimedOrder::Classical(4))
        }
        // Seven-fold symmetric composition of Strang steps with weights
        // g1 g2 g3 g4 g3 g2 g1, written out as a VTV sequence.
        "chambers6" => Method::new(
            name,
            Vtv,
            cx(&[
                ("0.116900037554661284", "0.0434282546160603418"),
                ("0.129559101282088263", "-0.123989612188092593"),
                ("0.186532492812133818", "0.00310743071007267534"),
            ]),
            cx(&[
                ("0.0584500187773306422", "0.0217141273080301709"),
                ("0.123229569418374774", "-0.0402806787860161258"),
                ("0.158045797047111040", "-0.0604410907390099590"),
            ]),
            None,
            ClaimedOrder::Classical(6),
        ),
        "v82" => {
            let (b1, b2, a1, _) = lobatto4();
            Method::new(name, Vtv, real(&[a1]), real(&[b1, b2]), None, generalized(&[8, 2]))
        }
        "t84_5" => Method::new(
            name,
            Tvt,
            cx(&[
                ("0.071401131540044698", "0.010155431019886789"),
                ("0.236383805190074736", "0.070427007139534522"),
            ]),
            cx(&[
                ("0.178696854264631978", "0.028197506313218021"),
                ("0.198453474708154649", "0.082962314733854963"),
            ]),
            None,
            generalized(&[8, 4]),
        ),
        "v84_5" => Method::new(
            name,
            Vtv,
            cx(&[
                ("0.175962140656732362", "-0.054483056228160557"),
                ("0.181259898687454283", "-0.034864508232090522"),
            ]),
            cx(&[
                ("0.052472525516129026", "-0.010958940842458138"),
                ("0.246023563332753880", "-0.125228547924834352"),
            ]),
            None,
            generalized(&[8, 4]),
        ),
        "t864_7" => Method::new(
            name,
            Tvt,
            cx(&[
                ("0.055705821110864236", "0.018670384565085049"),
                ("0.118843282163492564", "-0.024151805322796634"),
                ("0.158591515575195578", "-0.076302551893579599"),
            ]),
            cx(&[
                ("0.115779449626990422", "0.046131356173382847"),
                ("0.129128920804026450", "-0.119039413303774209"),
                ("0.184643464154438944", "-0.003053761445376182"),
            ]),
            None,
            generalized(&[8, 6, 4]),
        ),
        "v864_7" => Method::new(
            name,
            Vtv,
            cx(&[
                ("0.108904710931114447", "-0.075700232434276860"),
                ("0.106594114300156182", "0.139651903644940761"),
                ("0.204897016414416105", "0.009719057955143112"),
            ]),
            cx(&[
                ("0.060017770752528926", "-0.009696150746907738"),
                ("0.067017987316853817", "0.003927567742822542"),
                ("0.189300872388005476", "0.091055103879530385"),
            ]),
            None,
            generalized(&[8, 6, 4]),
        ),
        "t86_9" => Method::new(
            name,
            Tvt,
            cx(&[
                ("0.042257897299860339", "-0.014215780224181831"),
                ("0.095260398471830494", "0.004518725891475591"),
                ("0.099960578944766657", "0.090271995071312563"),
                ("0.148695530402608487", "0.011438117187614089"),
            ]),
            cx(&[
                ("0.094894869367770736", "-0.037963806472588094"),
                ("0.097374660381711248", "0.088518877931710497"),
                ("0.118584793520055816", "0.038356250608401259"),
                ("0.136865119760326031", "-0.023587404969570006"),
            ]),
            None,
            generalized(&[8, 6]),
        ),
        "v86_9" => Method::new(
            name,
            Vtv,
            cx(&[
                ("0.087895680441261752", "0.036052576182866484"),
                ("0.095351855399045611", "-0.065128376035135147"),
                ("0.121865575594908413", "-0.054974002471495827"),
                ("0.141506882718462097", "0.024607229046524026"),
            ]),
            cx(&[
                ("0.032497706037458608", "0.010641310380458924"),
                ("0.094180923422602148", "0.023866875362648754"),
                ("0.101132953097231180", "-0.112201757337044841"),
                ("0.160941382119434892", "-0.016127643896952891"),
            ]),
            None,
            generalized(&[8, 6]),
        ),
        "chin4m" => Method::new(
            name,
            Vtv,
            vec![],
            real(&[1.0 / 6.0]),
            Some(real(&[0.0, 1.0 / 72.0])),
            ClaimedOrder::Classical(4),
        ),
        // Real, positive fourth-order VTV scheme with four equal kinetic substeps
        // and the gradient correction on the central potential stage.
        "omf4m" => Method::new(
            name,
            Vtv,
            real(&[0.25]),
            real(&[1.0 / 10.0, 4.0 / 15.0]),
            Some(real(&[0.0, 0.0, 1.0 / 360.0])),
            ClaimedOrder::Classical(4),
        ),
        "v84m4_lr" => {
            let (b1, b2, a1, c1) = lobatto4();
            Method::new(
                name,
                Vtv,
                real(&[a1]),
                real(&[b1, b2]),
                Some(real(&[c1, 0.0, 0.0])),
                generalized(&[8, 4]),
            )
        }
        "t84m_5" => Method::new(
            name,
            Tvt,
            re(&["0.058520963359694865", "0.207903047442871771"]),
            re(&["0.145381537601615725", "0.244351408696638327"]),
            Some(re(&["0.000245906549261228", "0.000259178561419125", "0.000938105701711153"])),
            generalized(&[8, 4]),
        ),
        "v84m_5" => Method::new(
            name,
            Vtv,
            re(&["0.142939324267716184", "0.242474508234531493"]),
            re(&["0.042308451243127365", "0.219303568753387110"]),
            Some(re(&["0.000232966269565498", "5.56677120231130e-7", "0.000794490777479431"])),
            generalized(&[8, 4]),
        ),
        "t86m_5" => Method::new(
            name,
            Tvt,
            cx(&[
                ("0.063556051997493102", "0.010606890396680920"),
                ("0.208998817231756322", "0.040240203826523395"),
            ]),
            cx(&[
                ("0.156939525347224563", "0.027931306200415819"),
                ("0.222383136675982213", "0.026033262090035938"),
            ]),
            Some(cx(&[
                ("0.000133739181746125", "0.000085540153220213"),
                ("0.000484323504408882", "0.000241671051573332"),
                ("0.000179180363327321", "-0.000858304413034511"),
            ])),
            generalized(&[8, 6]),
        ),
        "v86m_5" => Method::new(
            name,
            Vtv,
            cx(&[
                ("0.152650950104799817", "-0.030279967163699065"),
                ("0.226364275186039762", "-0.016537249619936515"),
            ]),
            cx(&[
                ("0.046213625838152095", "-0.007824529355983108"),
                ("0.224258052678856384", "-0.050879282402761772"),
            ]),
            Some(cx(&[
                ("0.000035830461339520", "0.000074370857685421"),
                ("0.000338053435041382", "-0.000490508913279372"),
                ("0.000408311644874003", "0.000484371967433683"),
            ])),
            generalized(&[8, 6]),
        ),
        _ => Err(Error::UnknownMethod(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_loads() {
        for name in CATALOG_NAMES {
            let m = catalog(name).unwrap();
            assert_eq!(m.name(), name);
        }
        assert!(matches!(catalog("rk4"), Err(Error::UnknownMethod(_))));
    }

    #[test]
    fn table_values() {
        let m = catalog("t84_5").unwrap();
        assert_eq!(m.half_a()[0], Complex64::new(0.071_401_131_540_044_7, 0.010_155_431_019_886_79));
        let lr = catalog("v84m4_lr").unwrap().expand();
        let w: Vec<f64> = lr.stages.iter().map(|s| s.weight.re).collect();
        assert!((w[0] - 0.05).abs() < 1e-16);
        assert!((w[2] - 49.0 / 180.0).abs() < 1e-16);
        assert!((w[4] - 16.0 / 45.0).abs() < 1e-15);
        assert!((w[1] - (0.5 - (3.0f64 / 28.0).sqrt())).abs() < 1e-16);
        assert!((lr.stages[0].modified_weight.re - (3861.0 - 791.0 * 21f64.sqrt()) / 129600.0).abs() < 1e-18);
    }

    #[test]
    fn triple_jump_branch() {
        let alpha = triple_jump_alpha();
        assert!((alpha.re - 0.32440).abs() < 5e-5, "{alpha}");
        assert!((alpha.im - 0.13460).abs() < 5e-5, "{alpha}");
        let beta = 1.0 - 2.0 * alpha;
        assert!(beta.re > 0.0);
    }

    #[test]
    fn complex_and_modified_flags() {
        for (name, complex, modified) in [
            ("strang", false, false),
            ("v82", false, false),
            ("yoshida4_complex", true, false),
            ("v86_9", true, false),
            ("chin4m", false, true),
            ("t84m_5", false, true),
            ("v86m_5", true, true),
        ] {
            let m = catalog(name).unwrap();
            assert_eq!(m.is_complex(), complex, "{name}");
            assert_eq!(m.is_modified(), modified, "{name}");
        }
    }
}
