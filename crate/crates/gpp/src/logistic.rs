//! Numerically stable logistic primitives.

/// `1 / (1 + e^-z)` without overflow at large |z|.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
pub fn softplus(z: f64) -> f64 {
    if z > 30.0 {
        z + (-z).exp()
    } else {
        z.exp().ln_1p()
    }
}

/// Bernoulli entropy `h(p) = -p log p - (1-p) log(1-p)` in nats.
pub fn bernoulli_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
}

/// Bernoulli entropy of `sigmoid(z)`, computed stably from the logit:
/// `h(sigmoid(z)) = sigmoid(z) softplus(-z) + sigmoid(-z) softplus(z)`.
pub fn bernoulli_entropy_of_logit(z: f64) -> f64 {
    sigmoid(z) * softplus(-z) + sigmoid(-z) * softplus(z)
}
