from qentropy.separation.cascade_utils import (
    CascadeConfig,
    CoefficientTable,
    StructuredState,
    beta_coefficients,
    branch_mass,
    build_cascade,
    cascade_state,
    cascade_table,
    check_concentration,
    concentration_report,
    cost_envelope,
    export_branch_masses_csv,
    export_table_csv,
    level_of,
    misplaced_mass,
    query_cost_Uk,
    simulate_branches,
    threshold,
    threshold_report,
)
