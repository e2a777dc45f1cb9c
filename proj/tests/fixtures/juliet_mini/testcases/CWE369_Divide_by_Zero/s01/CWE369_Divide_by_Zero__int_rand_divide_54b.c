/* TEMPLATE GENERATED TESTCASE FILE
Filename: CWE369_Divide_by_Zero__int_rand_divide_54b.c
*/
#include "std_testcase.h"

#ifndef OMITBAD

void CWE369_Divide_by_Zero__int_rand_divide_54b_badSink(int data)
{
    /* POTENTIAL FLAW: Possibly divide by zero */
    printIntLine(100 / data);
}

#endif /* OMITBAD */

#ifndef OMITGOOD

void CWE369_Divide_by_Zero__int_rand_divide_54b_goodG2BSink(int data)
{
    printIntLine(100 / data);
}

#endif /* OMITGOOD */
