import os
import logging

logger = logging.getLogger(__name__)

SIM_YML_TEMPLATE = """
# Experiment profiles for `icfs-wearsim run`; `target` picks one of `outputs`.
target: default

outputs:
  default:
    pfr: 0.2
    cf: 10
    policy: bl
    seed: 7
    workload_bytes: 4096
    preload_bytes: 51200

  observation_one:
    pfr: 0.6
    cf: 10
    policy: bl
    workload_bytes: 2048
    op_budget: 2000000

  buffered:
    pfr: 0.3
    cf: 10
    policy: bf
    sram_budget: 8192
    fail_threshold: 3
    success_threshold: 3
""".strip()

SWEEP_YML_TEMPLATE = """
# PFR x CF x policy grid for `icfs-wearsim sweep`.
pfr_list: [0.2, 0.3, 0.4]
cf_list: [5, 10, 15, 20]
policies: [bl, tp, tm, bf]
replicates: 30
base_seed: 0
jobs: 1
base:
  swap_threshold: 30
  op_budget: 300000
""".strip()

GITIGNORE_TEMPLATE = """
# python
__pycache__/
*.py[cod]
*$py.class
venv/
.venv/

# icfs-wearsim
results/
*.trace
""".strip()

README_TEMPLATE = """
# {project_name}

This project was generated by `icfs-wearsim init`.

## Getting Started

1.  **Pick an experiment**:
    Edit `sim.yml` and set `target` to one of the profiles under `outputs`.

2.  **Run it**:
    ```bash
    icfs-wearsim run --config sim.yml --out results/run
    ```

3.  **Sweep the grid and build plot data**:
    ```bash
    icfs-wearsim sweep --config sweep.yml --out results/sweep
    icfs-wearsim report results/sweep
    ```
""".strip()


def create_file(path, content):
    with open(path, "w") as f:
        f.write(content + "\n")
    logger.info(f"Created {path}")


def init_project(project_name="."):
    """
    Initializes a new experiment directory.

    Args:
        project_name (str): The name of the directory to create.
                            If ".", initializes in current directory.
    """
    base_dir = os.path.abspath(project_name)

    if project_name != "." and not os.path.exists(base_dir):
        os.makedirs(base_dir)
        logger.info(f"Created directory {base_dir}")

    create_file(os.path.join(base_dir, "sim.yml"), SIM_YML_TEMPLATE)
    create_file(os.path.join(base_dir, "sweep.yml"), SWEEP_YML_TEMPLATE)
    create_file(os.path.join(base_dir, ".gitignore"), GITIGNORE_TEMPLATE)

    # Never overwrite an existing README
    readme_path = os.path.join(base_dir, "README.md")
    if not os.path.exists(readme_path):
        name = os.path.basename(base_dir)
        if name == "." or not name:
            name = "My Experiments"
        create_file(readme_path, README_TEMPLATE.format(project_name=name))
