//! Closed forms for the sizes of the attention event models.

fn binom(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Events of F(φ) with n revealed literals: one per S ⊆ At(φ) and per
/// choice of X_a ⊆ S for every agent.
pub fn f_events(n: u64, agents: u32) -> u64 {
    (0..=n).map(|k| binom(n, k) * 2u64.pow(k as u32 * agents)).sum()
}

/// Designated events of F(φ): S = At(φ), free X_a.
pub fn f_designated(n: u64, agents: u32) -> u64 {
    2u64.pow(n as u32 * agents)
}

/// Size of H(p), written out edge by edge: events p and ⊤, preconditions p
/// and ⊤, and per agent the edges (p:A_a p, p:A_a p), (p:¬A_a p, ⊤:⊤),
/// (⊤:⊤, ⊤:⊤). A_a p counts 3 symbols, ¬A_a p counts 4.
pub fn h_p_size(agents: usize) -> usize {
    let events = 2;
    let pre = 1 + 1;
    let per_agent = 3 + (3 + 3) + (4 + 1) + (1 + 1);
    events + pre + agents * per_agent
}

/// Events and per-agent edges of R(Γ) for |Γ| = n formulas whose subset
/// conjunctions are pairwise distinct: 2^n and 3^n.
pub fn r_counts(n: u32) -> (u64, u64) {
    (2u64.pow(n), 3u64.pow(n))
}
