use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "ie", version, about = "Arithmetic and calculus with infinitesimals")]
pub struct Cli {
    #[command(flatten)]
    pub config: ConfigArgs,

    /// Emit a JSON report instead of plain text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ConfigArgs {
    /// Series window W (number of kept terms).
    #[arg(long, global = true, env = "IE_WINDOW", default_value_t = 8)]
    pub window: usize,

    /// Decimal digits for transcendental coefficients.
    #[arg(long, global = true, env = "IE_PRECISION", default_value_t = 50)]
    pub precision: u32,

    /// Sampling horizon for stream comparisons and standard parts.
    #[arg(long, global = true, env = "IE_HORIZON", default_value_t = 10_000)]
    pub horizon: u64,

    /// Horizon for the limit battery and the convergence probe.
    #[arg(long, global = true, env = "IE_LIMIT_HORIZON", default_value_t = 1_000_000_000_000)]
    pub limit_horizon: u64,

    /// Agreement tolerance for standard parts (rational or decimal).
    #[arg(long, global = true, env = "IE_TOL", default_value = "1e-8")]
    pub tol: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate an expression on the series tier.
    Eval {
        expr: String,
        /// Bind a variable to a value, e.g. `x=H+eps`.
        #[arg(long = "at", value_name = "VAR=VALUE")]
        at: Vec<String>,
    },
    /// Standard part of a limited value.
    St { value: String },
    /// Classify a value as zero, infinitesimal, appreciable or unlimited.
    Classify { value: String },
    /// Derivative as the standard part of the difference quotient.
    Deriv {
        expr: String,
        #[arg(long)]
        at: String,
    },
    /// Limit of a sequence through the hypernatural battery.
    Limit {
        stream: String,
        /// Bind a stream variable, e.g. `x=partial_sum:1:9*10^(-k)`.
        #[arg(long = "with", value_name = "VAR=STREAM")]
        with: Vec<String>,
    },
    /// Continuity at a standard point by infinitesimal increments.
    Cont {
        expr: String,
        #[arg(long)]
        at: String,
    },
    /// Uniform continuity on a domain such as `R`, `[0,1]` or `(0,inf)`.
    Ucont {
        expr: String,
        #[arg(long)]
        domain: String,
    },
    /// Whether s(n, x) approaches f(x) at the infinitesimal generated by the rule.
    Uconv {
        #[arg(long)]
        sum: String,
        #[arg(long)]
        limit: String,
        #[arg(long, default_value = "1/n")]
        rule: String,
    },
    /// Decimal digits of a root by ten-way subdivision.
    Stevin {
        expr: String,
        #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
        bracket: String,
        #[arg(long)]
        digits: usize,
    },
    /// Root bracketing by m-way subdivision.
    Ivt {
        expr: String,
        #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
        bracket: String,
        #[arg(short = 'm', default_value_t = 2)]
        m: u32,
        #[arg(long)]
        iters: usize,
    },
    /// The delta kernel: exact value and quadrature probe.
    Delta {
        expr: String,
        #[arg(long)]
        at: String,
        #[arg(long, default_value = "1/n^2")]
        alpha: String,
        #[arg(long, default_value = "1/n")]
        eps: String,
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
        ns: Vec<u64>,
    },
    /// Order of two sequences along the sampling schedule.
    Compare {
        left: String,
        right: String,
        #[arg(long = "with", value_name = "VAR=STREAM")]
        with: Vec<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eval { .. } => "eval",
            Command::St { .. } => "st",
            Command::Classify { .. } => "classify",
            Command::Deriv { .. } => "deriv",
            Command::Limit { .. } => "limit",
            Command::Cont { .. } => "cont",
            Command::Ucont { .. } => "ucont",
            Command::Uconv { .. } => "uconv",
            Command::Stevin { .. } => "stevin",
            Command::Ivt { .. } => "ivt",
            Command::Delta { .. } => "delta",
            Command::Compare { .. } => "compare",
        }
    }
}
