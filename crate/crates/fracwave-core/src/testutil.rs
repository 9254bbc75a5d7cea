//! Extended-precision helpers for test oracles only. Production code
//! stays in plain f64.

pub(crate) mod dd {
    //! Minimal double-double arithmetic (Dekker/Knuth error-free
    //! transforms, products via FMA). Roughly 31 significant digits.

    #[derive(Debug, Clone, Copy)]
    pub struct Dd {
        pub hi: f64,
        pub lo: f64,
    }

    fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        (s, b - (s - a))
    }

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn two_prod(a: f64, b: f64) -> (f64, f64) {
        let p = a * b;
        (p, a.mul_add(b, -p))
    }

    impl From<f64> for Dd {
        fn from(x: f64) -> Self {
            Dd { hi: x, lo: 0.0 }
        }
    }

    impl Dd {
        pub fn add(self, o: Dd) -> Dd {
            let (s, e) = two_sum(self.hi, o.hi);
            let (hi, lo) = quick_two_sum(s, e + self.lo + o.lo);
            Dd { hi, lo }
        }

        pub fn sub(self, o: Dd) -> Dd {
            self.add(Dd {
                hi: -o.hi,
                lo: -o.lo,
            })
        }

        pub fn mul(self, o: Dd) -> Dd {
            let (p, e) = two_prod(self.hi, o.hi);
            let (hi, lo) = quick_two_sum(p, e + self.hi * o.lo + self.lo * o.hi);
            Dd { hi, lo }
        }

        pub fn div(self, o: Dd) -> Dd {
            let q1 = self.hi / o.hi;
            let r1 = self.sub(o.mul(Dd::from(q1)));
            let q2 = r1.hi / o.hi;
            let r2 = r1.sub(o.mul(Dd::from(q2)));
            let q3 = r2.hi / o.hi;
            let (hi, lo) = quick_two_sum(q1, q2 + q3);
            Dd { hi, lo }
        }
    }

    /// pi to double-double precision.
    pub fn pi() -> Dd {
        Dd {
            hi: std::f64::consts::PI,
            lo: 1.224_646_799_147_353_2e-16,
        }
    }

    /// sqrt(pi) via one Newton correction on the f64 seed.
    pub fn sqrt_pi() -> Dd {
        let s0 = std::f64::consts::PI.sqrt();
        let s0d = Dd::from(s0);
        let resid = pi().sub(s0d.mul(s0d));
        let corr = resid.hi / (2.0 * s0);
        let (hi, lo) = {
            let s = s0 + corr;
            (s, corr - (s - s0))
        };
        Dd { hi, lo }
    }

    /// Gamma(n2 / 2) for positive n2, by exact upward recursion from
    /// Gamma(1/2) = sqrt(pi) and Gamma(1) = 1.
    pub fn gamma_half_int(n2: i64) -> Dd {
        assert!(n2 >= 1, "argument must be a positive half-integer");
        if n2 % 2 == 0 {
            let m = n2 / 2;
            let mut acc = Dd::from(1.0);
            for k in 1..m {
                acc = acc.mul(Dd::from(k as f64));
            }
            acc
        } else {
            let j = (n2 - 1) / 2;
            let mut acc = sqrt_pi();
            for k in 0..j {
                acc = acc.mul(Dd::from(k as f64 + 0.5));
            }
            acc
        }
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        #[test]
        fn gamma_lattice() {
            assert!((gamma_half_int(2).hi - 1.0).abs() < 1e-30);
            assert!((gamma_half_int(10).hi - 24.0).abs() < 1e-12);
            // Gamma(3/2) = sqrt(pi)/2
            let g = gamma_half_int(3);
            assert!((g.hi - 0.886_226_925_452_758_0).abs() < 1e-15);
            // Gamma(5/2) = 3 sqrt(pi)/4
            let g = gamma_half_int(5);
            assert!((g.hi - 1.329_340_388_179_137_0).abs() < 1e-14);
        }

        #[test]
        fn dd_mul_keeps_extra_digits() {
            // (1 + 2^-60)^2 = 1 + 2^-59 + 2^-120; plain f64 loses it all
            let x = Dd {
                hi: 1.0,
                lo: (2.0f64).powi(-60),
            };
            let y = x.mul(x);
            assert!(y.hi == 1.0 && (y.lo - (2.0f64).powi(-59)).abs() < 1e-33);
        }
    }
}
