"""Package markets: incremental seller costs, Walrasian equilibrium and ascending auctions."""
from .auction import (
    AuctionResult,
    format_trace,
    revenue_to_cost,
    run_ascending_auction,
    run_extended_auction,
)
from .cfg import (
    CostFunctionGraph,
    characteristic,
    characteristic_matrix,
    complete_characteristic,
    complete_dual,
    complete_graph,
    dual_prices,
    forward_totals,
    make_cfg,
    reachability,
    star_graph,
    validate_cfg,
)
from .errors import (
    AuctionFailure,
    DomainError,
    InconsistentTotalsError,
    InfeasiblePartitionError,
    PakmarketError,
    ResourceLimitError,
    ValidationError,
)
from .instance import MarketInstance, collapse_prices, relabel_identical
from .lp import LinearProgram, LpSolution, solve_ip, solve_lp
from .market import PackageMultiset, Supply, enumerate_feasible, is_feasible, unpack
from .preferences import (
    AdditiveMarginal,
    BuyerValuation,
    IncrementalCfg,
    IncrementalCostSchedule,
    RevenueMax,
    SetUnion,
    aggregate_value,
    buyer_demand,
    check_subadditive,
    check_superadditive,
    seller_supply,
    total_cost,
)
from .serialization import dumps_market, parse_market, serialize_market
from .setfunctions import SetFunction, is_set_cover_submodular, is_set_cover_supermodular, set_function_dual
from .welfare import (
    build_swlp,
    check_pricing_decomposition,
    efficient_allocation,
    enumerate_equilibrium_prices,
    lexicographic_min_prices,
    solve_welfare,
    verify_equilibrium,
)

__version__ = "0.1.0"
